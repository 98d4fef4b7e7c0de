//! End-to-end delay models and the per-trial reception schedule.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::tree::{GlobalTree, NodeId};

/// Mean block propagation delay between node pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DelayModel {
    /// Every pair has exponential delay with mean `delta`. `delta = 0` is the
    /// zero-delay model; `delta = inf` means blocks are never delivered.
    Homogeneous { delta: f64 },
    /// Nodes are split into consecutive index ranges by `fractions`; group
    /// `g` has speed `deltas[g]` and a link runs at the slower endpoint's
    /// speed.
    Heterogeneous { deltas: Vec<f64>, fractions: Vec<f64> },
}

impl Default for DelayModel {
    fn default() -> Self {
        DelayModel::Homogeneous { delta: 1.0 }
    }
}

fn check_delta(name: &'static str, d: f64) -> Result<()> {
    if d.is_nan() || d < 0.0 {
        return Err(Error::param(name, format!("must be non-negative, got {d}")));
    }
    Ok(())
}

impl DelayModel {
    pub fn homogeneous(delta: f64) -> Self {
        DelayModel::Homogeneous { delta }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DelayModel::Homogeneous { delta } => check_delta("delta", *delta),
            DelayModel::Heterogeneous { deltas, fractions } => {
                if deltas.is_empty() || deltas.len() != fractions.len() {
                    return Err(Error::param("deltas", "need one fraction per group and at least one group"));
                }
                for &d in deltas {
                    check_delta("deltas", d)?;
                }
                if fractions.iter().any(|&f| f.is_nan() || f <= 0.0) {
                    return Err(Error::param("fractions", "every group fraction must be positive"));
                }
                let total: f64 = fractions.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::param("fractions", format!("must sum to 1, got {total}")));
                }
                Ok(())
            }
        }
    }

    /// The delay a sweep axis refers to: the homogeneous mean, or the first
    /// group's mean for a heterogeneous network.
    pub fn reference_delta(&self) -> f64 {
        match self {
            DelayModel::Homogeneous { delta } => *delta,
            DelayModel::Heterogeneous { deltas, .. } => deltas[0],
        }
    }

    /// Rescale so that [`reference_delta`](Self::reference_delta) equals
    /// `delta`, keeping group ratios.
    pub fn with_reference_delta(&self, delta: f64) -> Self {
        match self {
            DelayModel::Homogeneous { .. } => DelayModel::Homogeneous { delta },
            DelayModel::Heterogeneous { deltas, fractions } => {
                let base = deltas[0];
                DelayModel::Heterogeneous {
                    deltas: deltas.iter().map(|d| d / base * delta).collect(),
                    fractions: fractions.clone(),
                }
            }
        }
    }

    /// Resolve group membership for an `n`-node network.
    pub fn bind(&self, n: u32) -> Result<Network> {
        self.validate()?;
        if n == 0 {
            return Err(Error::param("n", "network needs at least one node"));
        }
        let (group_delta, bounds) = match self {
            DelayModel::Homogeneous { delta } => (vec![*delta], vec![n]),
            DelayModel::Heterogeneous { deltas, fractions } => {
                let mut acc = 0.0;
                let mut bounds: Vec<u32> = fractions
                    .iter()
                    .map(|f| {
                        acc += f;
                        (acc * n as f64).round() as u32
                    })
                    .collect();
                *bounds.last_mut().expect("non-empty") = n;
                (deltas.clone(), bounds)
            }
        };
        Ok(Network { n, group_delta, bounds })
    }
}

/// A delay model bound to a concrete node count.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    n: u32,
    group_delta: Vec<f64>,
    /// Exclusive upper node index of each group.
    bounds: Vec<u32>,
}

impl Network {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn group_of(&self, node: NodeId) -> Option<usize> {
        if node.0 >= self.n {
            return None;
        }
        Some(self.bounds.partition_point(|&b| b <= node.0))
    }

    pub fn is_zero_delay(&self) -> bool {
        self.group_delta.iter().all(|&d| d == 0.0)
    }

    fn mean_unchecked(&self, src: NodeId, dst: NodeId) -> f64 {
        if self.group_delta.len() == 1 {
            return self.group_delta[0];
        }
        let g = |m: NodeId| self.bounds.partition_point(|&b| b <= m.0);
        self.group_delta[g(src)].max(self.group_delta[g(dst)])
    }

    /// Mean delay of the `src → dst` link.
    pub fn mean_delay(&self, src: NodeId, dst: NodeId) -> Result<f64> {
        for m in [src, dst] {
            if m.0 >= self.n {
                return Err(Error::param("node", format!("{m} outside network of {} nodes", self.n)));
            }
        }
        Ok(self.mean_unchecked(src, dst))
    }

    /// One exponential delay draw for a `src → dst` transmission.
    pub fn sample_delay<R: Rng + ?Sized>(&self, src: NodeId, dst: NodeId, rng: &mut R) -> Result<f64> {
        if src == dst {
            return Err(Error::param("dst", "a node does not transmit to itself"));
        }
        let mean = self.mean_delay(src, dst)?;
        Ok(scaled_exp(mean, rng))
    }
}

/// `mean * Exp(1)`, so one uniform stream couples runs across delay values.
pub(crate) fn scaled_exp<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> f64 {
    let e: f64 = Exp1.sample(rng);
    if mean == 0.0 {
        0.0
    } else if mean.is_infinite() {
        f64::INFINITY
    } else {
        mean * e
    }
}

/// Lazily sampled reception times `R_{b,m}` for one trial.
///
/// A block reaches its own proposer at its decision time and any other node
/// at `decision_time + X`, with `X` drawn once from the delay model and then
/// frozen. Only nodes that are actually consulted (proposers and polled
/// nodes) ever get a row.
pub struct ReceptionSchedule<'a> {
    network: &'a Network,
    rng: StreamRng,
    row_of: HashMap<NodeId, usize>,
    rows: Vec<Vec<f64>>,
}

impl<'a> ReceptionSchedule<'a> {
    pub fn new(network: &'a Network, rng: StreamRng) -> Self {
        ReceptionSchedule { network, rng, row_of: HashMap::new(), rows: Vec::new() }
    }

    pub fn network(&self) -> &Network {
        self.network
    }

    /// Number of sampled `(block, node)` pairs.
    pub fn sampled(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    /// Reception times at `node` for the first `count` blocks of `tree`,
    /// sampling whatever is missing.
    pub fn row(&mut self, tree: &GlobalTree, node: NodeId, count: usize) -> &[f64] {
        let next = self.rows.len();
        let r = *self.row_of.entry(node).or_insert(next);
        if r == next {
            self.rows.push(Vec::new());
        }
        let row = &mut self.rows[r];
        for idx in row.len()..count {
            let block = tree.block(idx);
            let t = if block.proposer == node {
                block.decision_time
            } else {
                let mean = self.network.mean_unchecked(block.proposer, node);
                block.decision_time + scaled_exp(mean, &mut self.rng)
            };
            row.push(t);
        }
        &row[..count]
    }

    pub fn reception_time(&mut self, tree: &GlobalTree, block_idx: usize, node: NodeId) -> f64 {
        self.row(tree, node, block_idx + 1)[block_idx]
    }
}
