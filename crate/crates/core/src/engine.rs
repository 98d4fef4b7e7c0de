//! Trial driver, Monte Carlo aggregation and the `Δ_θ(ℓ)` search.

use std::collections::BTreeMap;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrival::{generate_arrivals, ArrivalProcess};
use crate::error::{Error, Result};
use crate::network::{DelayModel, Network, ReceptionSchedule};
use crate::protocol::{
    decide_parent, merge_views, polling_outcome, select_polled, truncate_view, ForkChoiceRule, PollSettings,
    PollingVariant, Proposal, SnapshotPolicy,
};
use crate::rng::{derive_seed, stream, Purpose};
use crate::tree::{Block, BlockId, GlobalTree, NodeId, TreeShape};

/// Unit of the polling durations in [`SimConfig::polling`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PollingUnits {
    #[default]
    Seconds,
    /// Multiples of the delay model's reference delay, so they follow a
    /// sweep over `Δ`.
    Delta,
}

fn default_ell() -> u32 {
    1
}
fn default_trials() -> u32 {
    200
}

/// Full parameterisation of one simulated setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n: u32,
    pub k: u32,
    pub t: u32,
    #[serde(default)]
    pub arrival: ArrivalProcess,
    #[serde(default)]
    pub delay: DelayModel,
    /// Proposer waiting time `Δ̃`.
    #[serde(default)]
    pub wait: f64,
    #[serde(default = "default_ell")]
    pub ell: u32,
    #[serde(default)]
    pub polling: PollingVariant,
    #[serde(default)]
    pub polling_units: PollingUnits,
    #[serde(default)]
    pub snapshot: SnapshotPolicy,
    #[serde(default)]
    pub rule: ForkChoiceRule,
    /// Polled nodes only send blocks from the last `truncate` epochs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncate: Option<u32>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u32,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 2000,
            k: 1,
            t: 50,
            arrival: ArrivalProcess::Deterministic,
            delay: DelayModel::homogeneous(1.0),
            wait: 0.0,
            ell: 1,
            polling: PollingVariant::Instant,
            polling_units: PollingUnits::Seconds,
            snapshot: SnapshotPolicy::Decision,
            rule: ForkChoiceRule::Nakamoto,
            truncate: None,
            seed: 0,
            trials: 200,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::param("k", "need at least one proposer per epoch"));
        }
        if self.n < self.k {
            return Err(Error::param("n", format!("{} nodes cannot host {} proposers", self.n, self.k)));
        }
        if self.t == 0 {
            return Err(Error::param("t", "need at least one epoch"));
        }
        if self.ell == 0 || self.ell > self.n {
            return Err(Error::param("ell", format!("must lie in 1..={}, got {}", self.n, self.ell)));
        }
        if self.trials == 0 {
            return Err(Error::param("trials", "need at least one trial"));
        }
        if !(0.0..1.0).contains(&self.wait) {
            return Err(Error::param("wait", format!("must lie in [0, 1), got {}", self.wait)));
        }
        if self.truncate == Some(0) {
            return Err(Error::param("truncate", "must be at least 1"));
        }
        self.arrival.validate()?;
        self.delay.validate()?;
        self.polling.validate()
    }

    pub fn delta(&self) -> f64 {
        self.delay.reference_delta()
    }

    /// Same setting at a different reference delay.
    pub fn with_delta(&self, delta: f64) -> Self {
        SimConfig { delay: self.delay.with_reference_delta(delta), ..self.clone() }
    }

    pub fn with_ell(&self, ell: u32) -> Self {
        SimConfig { ell, ..self.clone() }
    }

    /// Polling durations in seconds.
    pub fn effective_polling(&self) -> PollingVariant {
        match self.polling_units {
            PollingUnits::Seconds => self.polling.clone(),
            PollingUnits::Delta => self.polling.scaled(self.delta()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub tree: GlobalTree,
    pub longest_chain: u32,
    pub shape: TreeShape,
    /// Decision time of every block, in `(epoch, slot)` order.
    pub decision_times: Vec<f64>,
}

impl TrialResult {
    pub fn throughput(&self) -> f64 {
        self.longest_chain as f64 / self.tree.epochs() as f64
    }
}

/// What a proposer knew when it decided, for instrumentation.
#[derive(Debug, Clone)]
pub struct ProposalRecord<'a> {
    pub id: BlockId,
    pub proposer: NodeId,
    pub polled: &'a [NodeId],
    pub election_time: f64,
    pub decision_time: f64,
    /// Blocks any contributing node had received, over the tree so far.
    pub received: &'a [bool],
    pub parent: BlockId,
}

/// A validated configuration with its network resolved.
pub struct Simulator {
    config: SimConfig,
    network: Network,
    settings: PollSettings,
}

impl Simulator {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let network = config.delay.bind(config.n)?;
        let settings =
            PollSettings { variant: config.effective_polling(), wait: config.wait, snapshot: config.snapshot };
        Ok(Simulator { config, network, settings })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn run_trial(&self, trial: u64) -> TrialResult {
        self.run_trial_observed(trial, |_| {})
    }

    /// Run one trial; `observe` sees every proposal as it is decided.
    pub fn run_trial_observed<F>(&self, trial: u64, mut observe: F) -> TrialResult
    where
        F: FnMut(&ProposalRecord<'_>),
    {
        let cfg = &self.config;
        let seed = cfg.seed;
        let arrivals = generate_arrivals(&cfg.arrival, cfg.t, &mut stream(seed, Purpose::Arrivals, trial))
            .expect("arrival process validated");
        let mut selection = stream(seed, Purpose::Selection, trial);
        let mut responses = stream(seed, Purpose::PollResponses, trial);
        let mut ties = stream(seed, Purpose::TieBreak, trial);
        let mut schedule = ReceptionSchedule::new(&self.network, stream(seed, Purpose::Delays, trial));

        let mut tree = GlobalTree::new(cfg.k);
        let mut pending = Vec::with_capacity(cfg.k as usize);
        for (e, &gamma) in arrivals.iter().enumerate() {
            let epoch = e as u32 + 1;
            tree.begin_epoch(gamma).expect("arrivals strictly increase");
            let proposers = index::sample(&mut selection, cfg.n as usize, cfg.k as usize);
            for (s, proposer) in proposers.into_iter().enumerate() {
                let proposer = NodeId(proposer as u32);
                let polled = select_polled(cfg.n, cfg.ell, proposer, &mut selection).expect("ell validated");
                let proposal = Proposal { proposer, polled: &polled, election_time: gamma };
                let mut outcome = polling_outcome(&self.settings, &proposal, &mut schedule, &tree, &mut responses);
                if let Some(b) = cfg.truncate {
                    for v in outcome.views.iter_mut().skip(1) {
                        *v = truncate_view(&tree, v, epoch, b).expect("truncate validated");
                    }
                }
                let merged = merge_views(&tree, &outcome.views);
                let parent = decide_parent(cfg.rule, &tree, &merged, &mut ties);
                let id = BlockId::new(epoch, s as u32 + 1);
                observe(&ProposalRecord {
                    id,
                    proposer,
                    polled: &polled,
                    election_time: gamma,
                    decision_time: outcome.decision_time,
                    received: merged.received_mask(),
                    parent,
                });
                pending.push(Block { id, parent, proposer, decision_time: outcome.decision_time });
            }
            for block in pending.drain(..) {
                tree.push(block).expect("parents come from earlier epochs");
            }
        }
        let decision_times = tree.blocks().iter().map(|b| b.decision_time).collect();
        TrialResult { longest_chain: tree.longest_chain(), shape: tree.shape(), decision_times, tree }
    }

    /// Longest-chain length of every trial, in trial order.
    pub fn chain_lengths(&self) -> Vec<u32> {
        (0..self.config.trials as u64).into_par_iter().map(|i| self.run_trial(i).longest_chain).collect()
    }

    pub fn estimate_throughput(&self) -> Result<ThroughputEstimate> {
        if self.config.trials < 2 {
            return Err(Error::param("trials", "need at least two trials for a standard error"));
        }
        let t = self.config.t as f64;
        let samples: Vec<f64> = self.chain_lengths().into_iter().map(|l| l as f64 / t).collect();
        Ok(ThroughputEstimate::from_samples(&samples))
    }

    pub fn estimate_shape_pmf(&self) -> ShapePmf {
        if self.config.k * self.config.t > 6 {
            log::warn!(
                "k*t = {}: the number of tree shapes grows super-exponentially; the PMF will be sparse",
                self.config.k * self.config.t
            );
        }
        let shapes: Vec<TreeShape> =
            (0..self.config.trials as u64).into_par_iter().map(|i| self.run_trial(i).shape).collect();
        let mut counts = BTreeMap::new();
        for s in shapes {
            *counts.entry(s).or_insert(0u64) += 1;
        }
        ShapePmf { counts, trials: self.config.trials as u64 }
    }
}

pub fn run_trial(config: &SimConfig, trial: u64) -> Result<TrialResult> {
    Ok(Simulator::new(config.clone())?.run_trial(trial))
}

pub fn estimate_throughput(config: &SimConfig) -> Result<ThroughputEstimate> {
    Simulator::new(config.clone())?.estimate_throughput()
}

pub fn estimate_shape_pmf(config: &SimConfig) -> Result<ShapePmf> {
    Ok(Simulator::new(config.clone())?.estimate_shape_pmf())
}

/// Sample mean and standard error of per-trial throughput.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u32,
}

impl ThroughputEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let (mean, stderr) = mean_stderr(samples);
        ThroughputEstimate { mean, stderr, trials: samples.len() as u32 }
    }

    /// `sqrt(se_a² + se_b²)`, the standard error of a difference of means.
    pub fn pooled_stderr(&self, other: &Self) -> f64 {
        self.stderr.hypot(other.stderr)
    }
}

/// Mean and standard error (sample sd over `sqrt(len)`).
pub fn mean_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Empirical distribution of tree shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapePmf {
    pub counts: BTreeMap<TreeShape, u64>,
    pub trials: u64,
}

impl ShapePmf {
    pub fn probability(&self, shape: &TreeShape) -> f64 {
        self.counts.get(shape).copied().unwrap_or(0) as f64 / self.trials as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TreeShape, u64, f64)> {
        self.counts.iter().map(|(s, &c)| (s, c, c as f64 / self.trials as f64))
    }

    pub fn total_variation(&self, other: &ShapePmf) -> f64 {
        let mut keys: Vec<&TreeShape> = self.counts.keys().chain(other.counts.keys()).collect();
        keys.sort();
        keys.dedup();
        0.5 * keys.into_iter().map(|s| (self.probability(s) - other.probability(s)).abs()).sum::<f64>()
    }
}

/// One row of a `(Δ, ℓ)` sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    pub ell: u32,
    pub variant: String,
    pub n: u32,
    pub k: u32,
    pub t: u32,
    pub trials: u32,
    pub mean_throughput: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Estimate throughput on the `deltas × ells` grid, `ell` outermost.
    pub fn run(
        template: &SimConfig,
        deltas: &[f64],
        ells: &[u32],
        mut progress: impl FnMut(&SweepRow),
    ) -> Result<Self> {
        let mut rows = Vec::with_capacity(deltas.len() * ells.len());
        for &ell in ells {
            for &delta in deltas {
                let cfg = template.with_delta(delta).with_ell(ell);
                let est = estimate_throughput(&cfg)?;
                let row = SweepRow {
                    delta,
                    ell,
                    variant: cfg.polling.label().to_string(),
                    n: cfg.n,
                    k: cfg.k,
                    t: cfg.t,
                    trials: cfg.trials,
                    mean_throughput: est.mean,
                    stderr: est.stderr,
                };
                progress(&row);
                rows.push(row);
            }
        }
        Ok(SweepTable { rows })
    }
}

/// Settings for [`delta_at_threshold`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSettings {
    pub threshold: f64,
    /// Stop once the bracket is narrower than this fraction of its midpoint.
    pub rel_tol: f64,
    /// Explicit `(lo, hi)`; otherwise start near zero and double upward.
    pub bracket: Option<(f64, f64)>,
    /// Smallest delay probed when bracketing automatically.
    pub min_delta: f64,
    /// Independent searches with derived seeds; their spread gives a
    /// standard error.
    pub replicates: u32,
}

impl Default for SearchSettings {
    fn default() -> Self {
        SearchSettings { threshold: 0.8, rel_tol: 0.05, bracket: None, min_delta: 1e-3, replicates: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSearch {
    pub ell: u32,
    pub delta: f64,
    pub stderr: f64,
    pub replicates: Vec<f64>,
    pub probes: usize,
}

/// Largest `Δ` whose estimated throughput still reaches the threshold:
/// bracket, bisect to the relative tolerance, then interpolate linearly.
///
/// Every probe of one search reuses the same seed, so neighbouring probes
/// see coupled randomness and the estimated curve is close to monotone.
pub fn delta_at_threshold(ell: u32, template: &SimConfig, settings: &SearchSettings) -> Result<DeltaSearch> {
    if settings.replicates == 0 {
        return Err(Error::param("replicates", "need at least one search"));
    }
    if settings.rel_tol.is_nan() || settings.rel_tol <= 0.0 {
        return Err(Error::param("rel_tol", "must be positive"));
    }
    let base = template.with_ell(ell);
    let mut probes = 0;
    let mut found = Vec::with_capacity(settings.replicates as usize);
    for r in 0..settings.replicates {
        let seed = if r == 0 { base.seed } else { derive_seed(base.seed, r as u64) };
        let cfg = SimConfig { seed, ..base.clone() };
        let mut throughput = |delta: f64| -> Result<f64> {
            probes += 1;
            Ok(estimate_throughput(&cfg.with_delta(delta))?.mean)
        };
        let theta = settings.threshold;
        // Invariant: throughput(lo) >= theta > throughput(hi).
        let ((mut lo, mut f_lo), (mut hi, mut f_hi)) = match settings.bracket {
            Some((lo, hi)) => {
                let (f_lo, f_hi) = if lo < hi { (throughput(lo)?, throughput(hi)?) } else { (f64::NAN, f64::NAN) };
                if !(f_lo >= theta && f_hi < theta) {
                    return Err(Error::Search(format!("throughput does not cross {theta} on [{lo}, {hi}]")));
                }
                ((lo, f_lo), (hi, f_hi))
            }
            None => {
                let lo = settings.min_delta;
                let f_lo = throughput(lo)?;
                if f_lo < theta {
                    return Err(Error::Domain(format!("throughput {theta} is not reached even at delta = {lo}")));
                }
                let mut low = (lo, f_lo);
                let mut hi = if base.delta() > lo { base.delta() } else { 1.0 };
                let mut doublings = 0;
                loop {
                    let f = throughput(hi)?;
                    if f < theta {
                        break (low, (hi, f));
                    }
                    low = (hi, f);
                    hi *= 2.0;
                    doublings += 1;
                    if doublings > 40 {
                        return Err(Error::Search(format!("throughput stays above {theta} up to delta = {hi}")));
                    }
                }
            }
        };
        while hi - lo > settings.rel_tol * 0.5 * (lo + hi) {
            let mid = 0.5 * (lo + hi);
            let f = throughput(mid)?;
            if f >= theta {
                (lo, f_lo) = (mid, f);
            } else {
                (hi, f_hi) = (mid, f);
            }
        }
        // Linear interpolation inside the final bracket, so estimates are
        // not quantised to the bisection grid.
        let w = if f_lo > f_hi { ((f_lo - theta) / (f_lo - f_hi)).clamp(0.0, 1.0) } else { 0.5 };
        found.push(lo + w * (hi - lo));
    }
    let (delta, stderr) = mean_stderr(&found);
    Ok(DeltaSearch { ell, delta, stderr, replicates: found, probes })
}
