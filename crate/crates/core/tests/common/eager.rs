//! A deliberately naive reference simulator. Every delay is drawn up front
//! into a full (block, node) reception matrix and each node replays its
//! receptions in time order through an explicit orphan cache. It shares no
//! code with the library beyond the standard RNG crates.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::Exp1;

const GENESIS: usize = usize::MAX;

#[derive(PartialEq)]
struct Arrival {
    time: f64,
    block: usize,
}

impl Eq for Arrival {}

impl Ord for Arrival {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed so the heap pops the earliest reception.
        other.time.total_cmp(&self.time).then(other.block.cmp(&self.block))
    }
}

impl PartialOrd for Arrival {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Default)]
struct Node {
    inbox: BinaryHeap<Arrival>,
    visible: HashSet<usize>,
    orphans: HashMap<usize, Vec<usize>>,
}

impl Node {
    fn advance(&mut self, now: f64, parent: &[usize]) {
        while self.inbox.peek().is_some_and(|a| a.time <= now) {
            let b = self.inbox.pop().unwrap().block;
            let p = parent[b];
            if p == GENESIS || self.visible.contains(&p) {
                let mut ready = vec![b];
                while let Some(x) = ready.pop() {
                    self.visible.insert(x);
                    if let Some(kids) = self.orphans.remove(&x) {
                        ready.extend(kids);
                    }
                }
            } else {
                self.orphans.entry(p).or_default().push(b);
            }
        }
    }

    fn holdings(&self) -> impl Iterator<Item = usize> + '_ {
        self.visible.iter().copied().chain(self.orphans.values().flatten().copied())
    }
}

/// Longest-chain length of one trial: one proposer per unit epoch, instant
/// polling of `ell - 1` other nodes, no waiting, homogeneous mean `delta`.
pub fn eager_chain_length(n: usize, t: usize, ell: usize, delta: f64, rng: &mut StdRng) -> usize {
    let mut nodes: Vec<Node> = (0..n).map(|_| Node::default()).collect();
    let mut parent: Vec<usize> = Vec::with_capacity(t);
    let mut depth: Vec<usize> = Vec::with_capacity(t);
    for j in 0..t {
        let now = (j + 1) as f64;
        let proposer = rng.random_range(0..n);
        let mut asked = vec![proposer];
        while asked.len() < ell {
            let c = rng.random_range(0..n);
            if !asked.contains(&c) {
                asked.push(c);
            }
        }
        let mut held = HashSet::new();
        for &v in &asked {
            nodes[v].advance(now, &parent);
            held.extend(nodes[v].holdings());
        }
        // Re-close the union over ancestors by fixed-point iteration.
        let mut usable: HashSet<usize> = HashSet::new();
        loop {
            let before = usable.len();
            for &b in &held {
                if parent[b] == GENESIS || usable.contains(&parent[b]) {
                    usable.insert(b);
                }
            }
            if usable.len() == before {
                break;
            }
        }
        let best = usable.iter().map(|&b| depth[b]).max().unwrap_or(0);
        let mut tips: Vec<usize> = usable.iter().copied().filter(|&b| depth[b] == best).collect();
        tips.sort_unstable();
        let chosen = if tips.is_empty() { GENESIS } else { tips[rng.random_range(0..tips.len())] };
        parent.push(chosen);
        depth.push(best + 1);
        for (v, node) in nodes.iter_mut().enumerate() {
            let time = if v == proposer { now } else { now + delta * rng.sample::<f64, _>(Exp1) };
            node.inbox.push(Arrival { time, block: j });
        }
    }
    depth.into_iter().max().unwrap_or(0)
}

/// Mean and standard error of `L/t` over `trials` eager runs.
pub fn eager_throughput(n: usize, t: usize, ell: usize, delta: f64, trials: usize, seed: u64) -> (f64, f64) {
    let mut rng = StdRng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..trials).map(|_| eager_chain_length(n, t, ell, delta, &mut rng) as f64 / t as f64).collect();
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}
