//! The bundled two-party causal game played with a process matrix that has
//! no definite causal order, alongside a causally ordered one.
//!
//! Alice gets a bit `a` and guesses `x`; Bob gets bits `b`, `b'` and guesses
//! `y`. For `b' = 0` Bob must guess `a` (`y = a`), for `b' = 1` Alice must
//! guess `b` (`x = b`). Inputs are uniform.

use serde::{Deserialize, Serialize};

use crate::correlations::ProbabilityTable;
use crate::error::{Error, Result};
use crate::evaluator::{evaluate_with, CorrelationEdge, Network, Node};
use crate::io::{examples, parse_theory, Theory};

/// Bound on the success probability of any causally ordered strategy.
pub const CAUSAL_BOUND: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcbReport {
    /// Success of the bundled strategy on the indefinite-order process.
    pub success: f64,
    /// The same local strategy on the causally ordered process.
    pub causal_process_success: f64,
    /// Best deterministic strategy over both fixed orders.
    pub best_classical_strategy: f64,
    pub causal_bound: f64,
    /// Joint table over `(a, b, b', x, y)` with uniform inputs.
    pub table: ProbabilityTable,
}

fn won(a: usize, b: usize, bp: usize, x: usize, y: usize) -> bool {
    if bp == 0 {
        y == a
    } else {
        x == b
    }
}

fn bit(label: &str) -> Result<usize> {
    match label {
        "0" => Ok(0),
        "1" => Ok(1),
        other => Err(Error::Network(format!("game outcome `{other}` is not a bit"))),
    }
}

/// Plays the game with the correlation `name` of `theory` on the first two
/// operations. Returns the success probability and the joint table.
pub fn play(theory: &Theory, name: &str) -> Result<(f64, ProbabilityTable)> {
    let ci = theory
        .correlations
        .iter()
        .position(|c| c.name == name)
        .ok_or_else(|| Error::Network(format!("no correlation `{name}`")))?;
    let corr = &theory.correlations[ci].correlation;
    let (alice, bob) = match theory.operations.as_slice() {
        [a, b, ..] => (a, b),
        _ => return Err(Error::Network("the game needs two operations".into())),
    };
    let mut outcomes = Vec::new();
    let mut weights = Vec::new();
    let mut success = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            for bp in 0..2 {
                let nodes = vec![
                    Node::new(alice.clone(), &format!("a{a}"))?,
                    Node::new(bob.clone(), &format!("b{b}{bp}"))?,
                ];
                let edge = CorrelationEdge {
                    correlation: corr.clone(),
                    operations: vec![0, 1],
                };
                let net = Network::new(nodes, vec![], vec![edge])?;
                let result = evaluate_with(&net, &theory.eval_options())?;
                for row in &result.table.rows {
                    let (x, y) = (bit(&row.outcome[0])?, bit(&row.outcome[1])?);
                    if won(a, b, bp, x, y) {
                        success += row.probability / 8.0;
                    }
                    outcomes.push(vec![a.to_string(), b.to_string(), bp.to_string(), x.to_string(), y.to_string()]);
                    weights.push(row.probability / 8.0);
                }
            }
        }
    }
    Ok((success, ProbabilityTable::from_weights(outcomes, weights)?))
}

/// Best success over deterministic strategies in which one party's guess can
/// depend on a one-bit message from the other. Mixtures and larger messages
/// through a qubit cannot beat this.
pub fn best_ordered_strategy() -> f64 {
    let mut best: f64 = 0.0;
    // Alice first: message e(a), guess x = f(a); Bob guesses y = h(m, b, b').
    for e in 0..4usize {
        for f in 0..4usize {
            for h in 0..256usize {
                let mut wins = 0;
                for a in 0..2 {
                    for b in 0..2 {
                        for bp in 0..2 {
                            let m = (e >> a) & 1;
                            let x = (f >> a) & 1;
                            let y = (h >> (m * 4 + b * 2 + bp)) & 1;
                            wins += won(a, b, bp, x, y) as u32;
                        }
                    }
                }
                best = best.max(wins as f64 / 8.0);
            }
        }
    }
    // Bob first: message g(b, b'), guess y = h(b, b'); Alice guesses x = f(m, a).
    for g in 0..16usize {
        for h in 0..16usize {
            for f in 0..16usize {
                let mut wins = 0;
                for a in 0..2 {
                    for b in 0..2 {
                        for bp in 0..2 {
                            let m = (g >> (b * 2 + bp)) & 1;
                            let y = (h >> (b * 2 + bp)) & 1;
                            let x = (f >> (m * 2 + a)) & 1;
                            wins += won(a, b, bp, x, y) as u32;
                        }
                    }
                }
                best = best.max(wins as f64 / 8.0);
            }
        }
    }
    best
}

/// Runs the bundled game file.
pub fn ocb_demo() -> Result<OcbReport> {
    let theory = parse_theory(examples::OCB, "ocb.correlation")?;
    let (success, table) = play(&theory, "ocb")?;
    let (causal_process_success, _) = play(&theory, "causal")?;
    Ok(OcbReport {
        success,
        causal_process_success,
        best_classical_strategy: best_ordered_strategy(),
        causal_bound: CAUSAL_BOUND,
        table,
    })
}
