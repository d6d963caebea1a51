//! Random causally ordered quantum networks (preparation, optional
//! instrument, measurement) compared against direct density-matrix
//! propagation.
//!
//! Wires are unnormalized maximally entangled projectors, so a wire between
//! `ρ` and an effect `E` contributes `Tr[ρ Eᵀ]`. Effects therefore enter the
//! network transposed; instrument Choi operators enter unchanged.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::evaluator::{evaluate, quantum_action, Endpoint, Network, Node, Wire};
use crate::linalg::{self, c, CMatrix};
use crate::operations::Operation;

/// A random chain and its expected outcome probabilities, with the last
/// operation varying fastest.
#[derive(Debug, Clone)]
pub struct RandomChain {
    pub network: Network,
    pub dims: Vec<usize>,
    pub expected: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BornReport {
    pub seed: u64,
    pub networks: usize,
    pub outcomes_compared: usize,
    pub max_deviation: f64,
}

fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

/// A random isometry `C^cols → C^rows` (`rows ≥ cols`).
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(rows >= cols, "an isometry needs rows >= cols");
    gaussian_matrix(rows, cols, rng).qr().q()
}

/// A random density matrix of rank between 1 and `n`.
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let rank = rng.random_range(1..=n);
    let g = gaussian_matrix(n, rank, rng);
    let m = &g * g.adjoint();
    let t = linalg::trace(&m);
    m / t
}

/// Kraus operators `d_in → d_out` for `outcomes` outcomes, jointly trace
/// preserving. Requires `d_out·outcomes ≥ d_in`.
pub fn random_kraus<R: Rng + ?Sized>(d_in: usize, d_out: usize, outcomes: usize, rng: &mut R) -> Vec<CMatrix> {
    let v = random_isometry(d_out * outcomes, d_in, rng);
    (0..outcomes).map(|k| v.rows(k * d_out, d_out).into_owned()).collect()
}

/// `Σ_ij |i⟩⟨j| ⊗ K|i⟩⟨j|K†`.
pub fn kraus_choi(k: &CMatrix) -> CMatrix {
    let (d_out, d_in) = k.shape();
    CMatrix::from_fn(d_in * d_out, d_in * d_out, |row, col| {
        let (i, p) = (row / d_out, row % d_out);
        let (j, q) = (col / d_out, col % d_out);
        k[(p, i)] * k[(q, j)].conj()
    })
}

/// A random POVM with `outcomes` elements.
pub fn random_povm<R: Rng + ?Sized>(n: usize, outcomes: usize, rng: &mut R) -> Vec<CMatrix> {
    random_kraus(n, n, outcomes, rng)
        .iter()
        .map(|k| k.adjoint() * k)
        .collect()
}

/// A chain with 2 or 3 operations on qubits and qutrits.
pub fn random_chain<R: Rng + ?Sized>(rng: &mut R) -> Result<RandomChain> {
    let with_instrument = rng.random_bool(0.5);
    let d0 = rng.random_range(2..=3);
    let rho = random_state(d0, rng);
    let mut ops = vec![Operation::single(
        "prep",
        quantum_action("rho", &[d0], vec![("0", rho.clone())])?,
    )];
    let mut states = vec![(1.0, rho)];
    let mut last_dim = d0;
    let mut dims = vec![d0];
    if with_instrument {
        let d1 = rng.random_range(2..=3);
        let outcomes = rng.random_range(d0.div_ceil(d1)..=3);
        let kraus = random_kraus(d0, d1, outcomes, rng);
        let events = kraus
            .iter()
            .enumerate()
            .map(|(i, k)| (i.to_string(), kraus_choi(k)))
            .collect::<Vec<_>>();
        ops.push(Operation::single(
            "inst",
            quantum_action("e", &[d0, d1], events.iter().map(|(l, m)| (l.as_str(), m.clone())).collect())?,
        ));
        states = states
            .iter()
            .flat_map(|(_, r)| kraus.iter().map(move |k| (1.0, k * r * k.adjoint())))
            .collect();
        last_dim = d1;
        dims.push(d1);
    }
    let povm = random_povm(last_dim, rng.random_range(2..=3), rng);
    let effects: Vec<(String, CMatrix)> = povm.iter().enumerate().map(|(i, e)| (i.to_string(), e.transpose())).collect();
    ops.push(Operation::single(
        "meas",
        quantum_action("m", &[last_dim], effects.iter().map(|(l, m)| (l.as_str(), m.clone())).collect())?,
    ));
    let mut expected = Vec::new();
    for (_, sigma) in &states {
        for e in &povm {
            expected.push(linalg::trace(&(sigma * e)).re);
        }
    }
    let mut wires = vec![];
    if with_instrument {
        wires.push(Wire::new(Endpoint::new(0, "rho", 0), Endpoint::new(1, "e", 0)));
        wires.push(Wire::new(Endpoint::new(1, "e", 1), Endpoint::new(2, "m", 0)));
    } else {
        wires.push(Wire::new(Endpoint::new(0, "rho", 0), Endpoint::new(1, "m", 0)));
    }
    let total: f64 = expected.iter().sum();
    expected.iter_mut().for_each(|p| *p /= total);
    let nodes = ops.into_iter().map(Node::first).collect();
    Ok(RandomChain {
        network: Network::new(nodes, wires, vec![])?,
        dims,
        expected,
    })
}

pub fn born_demo(seed: u64, networks: usize) -> Result<BornReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_deviation: f64 = 0.0;
    let mut outcomes_compared = 0;
    for _ in 0..networks {
        let chain = random_chain(&mut rng)?;
        let got = evaluate(&chain.network)?.table.probabilities();
        outcomes_compared += got.len();
        for (g, e) in got.iter().zip(&chain.expected) {
            max_deviation = max_deviation.max((g - e).abs());
        }
    }
    Ok(BornReport {
        seed,
        networks,
        outcomes_compared,
        max_deviation,
    })
}
