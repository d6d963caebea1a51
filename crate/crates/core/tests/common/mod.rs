//! Reference density-matrix simulator and random network builders shared by
//! the integration tests. Probabilities here come from Kraus evolution and
//! the plain Born rule, never from the evaluator's contraction.
#![allow(dead_code)]

use nalgebra::{Complex, DMatrix};
use opcone::evaluator::{quantum_action, Endpoint, Network, Node, Wire};
use opcone::operations::Operation;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

type C = Complex<f64>;
pub type M = DMatrix<C>;

pub fn gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> M {
    M::from_fn(rows, cols, |_, _| C::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
}

/// Orthonormal columns by Gram-Schmidt.
pub fn isometry(rows: usize, cols: usize, rng: &mut impl Rng) -> M {
    assert!(rows >= cols);
    let mut v = gaussian(rows, cols, rng);
    for j in 0..cols {
        for k in 0..j {
            let proj: C = (0..rows).map(|r| v[(r, k)].conj() * v[(r, j)]).sum();
            for r in 0..rows {
                let t = v[(r, k)];
                v[(r, j)] -= proj * t;
            }
        }
        let norm: f64 = (0..rows).map(|r| v[(r, j)].norm_sqr()).sum::<f64>().sqrt();
        for r in 0..rows {
            v[(r, j)] /= C::new(norm, 0.0);
        }
    }
    v
}

pub fn density(n: usize, rng: &mut impl Rng) -> M {
    let g = gaussian(n, rng.random_range(1..=n), rng);
    let m = &g * g.adjoint();
    let t: C = m.trace();
    m / t
}

/// Trace-preserving family of Kraus operators `d_in → d_out`.
pub fn kraus(d_in: usize, d_out: usize, outcomes: usize, rng: &mut impl Rng) -> Vec<M> {
    let v = isometry(d_out * outcomes, d_in, rng);
    (0..outcomes).map(|k| v.rows(k * d_out, d_out).into_owned()).collect()
}

pub fn povm(n: usize, outcomes: usize, rng: &mut impl Rng) -> Vec<M> {
    kraus(n, n, outcomes, rng).into_iter().map(|k| k.adjoint() * k).collect()
}

fn ket_bra(n: usize, i: usize, j: usize) -> M {
    let mut m = M::zeros(n, n);
    m[(i, j)] = C::new(1.0, 0.0);
    m
}

/// `Σ_ij |i⟩⟨j| ⊗ K|i⟩⟨j|K†`.
pub fn choi(k: &M) -> M {
    let (d_out, d_in) = k.shape();
    let mut j = M::zeros(d_in * d_out, d_in * d_out);
    for a in 0..d_in {
        for b in 0..d_in {
            let block = k * ket_bra(d_in, a, b) * k.adjoint();
            j += ket_bra(d_in, a, b).kronecker(&block);
        }
    }
    j
}

pub fn born(rho: &M, e: &M) -> f64 {
    (rho * e).trace().re
}

pub fn normalize(p: &[f64]) -> Vec<f64> {
    let t: f64 = p.iter().sum();
    p.iter().map(|x| x / t).collect()
}

/// A causally ordered network with its reference probabilities (last
/// operation fastest) and a short description of its shape.
pub struct Case {
    pub network: Network,
    pub expected: Vec<f64>,
    pub shape: String,
}

/// Prepare → measure, prepare → instrument → measure, or a bipartite source
/// measured by two parties, on qubits and qutrits.
pub fn random_case(rng: &mut impl Rng) -> Case {
    match rng.random_range(0..3) {
        0 => {
            let d = rng.random_range(2..=3);
            let rho = density(d, rng);
            let effects = povm(d, rng.random_range(2..=4), rng);
            let expected: Vec<f64> = effects.iter().map(|e| born(&rho, e)).collect();
            let ops = vec![prep(&rho, &[d]), measure("meas", &effects, d)];
            let wires = vec![wire(0, "rho", 0, 1, "m", 0)];
            Case {
                network: network(ops, wires),
                expected: normalize(&expected),
                shape: format!("prep({d}) -> meas"),
            }
        }
        1 => {
            let (d0, d1) = (rng.random_range(2..=3), rng.random_range(2..=3));
            let rho = density(d0, rng);
            let ks = kraus(d0, d1, rng.random_range(d0.div_ceil(d1)..=3), rng);
            let effects = povm(d1, rng.random_range(2..=3), rng);
            let mut expected = Vec::new();
            for k in &ks {
                let out = k * &rho * k.adjoint();
                for e in &effects {
                    expected.push(born(&out, e));
                }
            }
            let events: Vec<(String, M)> = ks.iter().enumerate().map(|(i, k)| (i.to_string(), choi(k))).collect();
            let inst = Operation::single(
                "inst",
                quantum_action("e", &[d0, d1], events.iter().map(|(l, m)| (l.as_str(), m.clone())).collect()).unwrap(),
            );
            let ops = vec![prep(&rho, &[d0]), inst, measure("meas", &effects, d1)];
            let wires = vec![wire(0, "rho", 0, 1, "e", 0), wire(1, "e", 1, 2, "m", 0)];
            Case {
                network: network(ops, wires),
                expected: normalize(&expected),
                shape: format!("prep({d0}) -> inst({d0}->{d1}) -> meas"),
            }
        }
        _ => {
            let (da, db) = (rng.random_range(2..=3), rng.random_range(2..=3));
            let rho = density(da * db, rng);
            let ea = povm(da, rng.random_range(2..=3), rng);
            let eb = povm(db, rng.random_range(2..=3), rng);
            let mut expected = Vec::new();
            for a in &ea {
                for b in &eb {
                    expected.push(born(&rho, &a.kronecker(b)));
                }
            }
            let ops = vec![prep(&rho, &[da, db]), measure("alice", &ea, da), measure("bob", &eb, db)];
            let wires = vec![wire(0, "rho", 0, 1, "m", 0), wire(0, "rho", 1, 2, "m", 0)];
            Case {
                network: network(ops, wires),
                expected: normalize(&expected),
                shape: format!("source({da}x{db}) -> meas, meas"),
            }
        }
    }
}

pub fn prep(rho: &M, dims: &[usize]) -> Operation {
    Operation::single("prep", quantum_action("rho", dims, vec![("0", rho.clone())]).unwrap())
}

/// Effects enter the network transposed: a wire pairs indices without
/// conjugation.
pub fn measure(name: &str, effects: &[M], d: usize) -> Operation {
    let labels: Vec<String> = (0..effects.len()).map(|i| i.to_string()).collect();
    let outs = labels.iter().zip(effects).map(|(l, e)| (l.as_str(), e.transpose())).collect();
    Operation::single(name, quantum_action("m", &[d], outs).unwrap())
}

pub fn wire(oa: usize, aa: &str, sa: usize, ob: usize, ab: &str, sb: usize) -> Wire {
    Wire::new(Endpoint::new(oa, aa, sa), Endpoint::new(ob, ab, sb))
}

pub fn network(ops: Vec<Operation>, wires: Vec<Wire>) -> Network {
    Network::new(ops.into_iter().map(Node::first).collect(), wires, vec![]).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
