//! Local views, the longest-chain attachment rule and ℓ-polling.
//!
//! A view is expressed over the blocks currently in the [`GlobalTree`]. The
//! engine only appends an epoch's blocks after all of that epoch's proposers
//! have decided, so "the tree so far" never contains same-epoch blocks.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{scaled_exp, ReceptionSchedule};
use crate::tree::{BlockId, GlobalTree, NodeId};

/// What one node knows: the blocks it has received, split into the
/// ancestor-closed visible part and the orphan cache.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalView {
    received: Vec<bool>,
    visible: Vec<bool>,
}

impl LocalView {
    /// Only genesis.
    pub fn empty(blocks: usize) -> Self {
        LocalView { received: vec![false; blocks], visible: vec![false; blocks] }
    }

    /// Close a received set over `tree`: a block is visible iff it and all
    /// of its ancestors were received.
    pub fn from_received(tree: &GlobalTree, received: Vec<bool>) -> Self {
        let mut visible = vec![false; received.len()];
        // Parents precede children in index order, so one pass suffices.
        for idx in 0..received.len() {
            visible[idx] = received[idx] && tree.parent_index(idx).is_none_or(|p| visible[p]);
        }
        LocalView { received, visible }
    }

    pub fn from_ids(tree: &GlobalTree, ids: &[BlockId]) -> Result<Self> {
        let mut received = vec![false; tree.len()];
        for &id in ids.iter().filter(|id| !id.is_genesis()) {
            let idx = tree.index_of(id).ok_or_else(|| Error::param("block", format!("{id} not in tree")))?;
            received[idx] = true;
        }
        Ok(LocalView::from_received(tree, received))
    }

    /// Number of tree blocks this view ranges over.
    pub fn scope(&self) -> usize {
        self.received.len()
    }

    pub fn has_received(&self, idx: usize) -> bool {
        self.received.get(idx).copied().unwrap_or(false)
    }

    pub fn is_visible(&self, idx: usize) -> bool {
        self.visible.get(idx).copied().unwrap_or(false)
    }

    pub fn is_orphan(&self, idx: usize) -> bool {
        self.has_received(idx) && !self.is_visible(idx)
    }

    pub fn received_mask(&self) -> &[bool] {
        &self.received
    }

    /// Visible blocks, genesis first.
    pub fn visible_ids(&self, tree: &GlobalTree) -> Vec<BlockId> {
        std::iter::once(BlockId::Genesis)
            .chain((0..self.scope()).filter(|&i| self.visible[i]).map(|i| tree.block(i).id))
            .collect()
    }

    pub fn orphan_ids(&self, tree: &GlobalTree) -> Vec<BlockId> {
        (0..self.scope()).filter(|&i| self.is_orphan(i)).map(|i| tree.block(i).id).collect()
    }

    /// Depth of the deepest visible block.
    pub fn longest_chain(&self, tree: &GlobalTree) -> u32 {
        (0..self.scope()).filter(|&i| self.visible[i]).map(|i| tree.depth(i)).max().unwrap_or(0)
    }
}

/// The view of `node` at `time`: everything it has received by then.
pub fn view_at(node: NodeId, time: f64, schedule: &mut ReceptionSchedule<'_>, tree: &GlobalTree) -> LocalView {
    let row = schedule.row(tree, node, tree.len());
    let received = row.iter().map(|&r| r <= time).collect();
    LocalView::from_received(tree, received)
}

/// Union of everything any view has received, re-closed over the tree. A
/// block orphaned in one view becomes visible when another view supplies its
/// ancestors.
pub fn merge_views(tree: &GlobalTree, views: &[LocalView]) -> LocalView {
    let scope = views.iter().map(LocalView::scope).max().unwrap_or(0);
    let mut received = vec![false; scope];
    for v in views {
        for (slot, &r) in received.iter_mut().zip(&v.received) {
            *slot |= r;
        }
    }
    LocalView::from_received(tree, received)
}

/// Only the blocks of epochs `t-b ..= t-1`, as sent by a bandwidth-limited
/// polled node. Closure is recomputed on the payload alone; merging it into
/// the requester's view restores whatever ancestors the requester has.
pub fn truncate_view(tree: &GlobalTree, view: &LocalView, epoch: u32, depth: u32) -> Result<LocalView> {
    if depth == 0 {
        return Err(Error::param("b", "truncation depth must be at least 1"));
    }
    let oldest = epoch.saturating_sub(depth).max(1);
    let received = (0..view.scope())
        .map(|i| view.received[i] && tree.block(i).id.epoch().is_some_and(|e| e >= oldest && e < epoch))
        .collect();
    Ok(LocalView::from_received(tree, received))
}

/// Pick `ell - 1` distinct nodes other than the proposer, uniformly.
pub fn select_polled<R: Rng + ?Sized>(n: u32, ell: u32, proposer: NodeId, rng: &mut R) -> Result<Vec<NodeId>> {
    if ell == 0 {
        return Err(Error::param("ell", "must be at least 1"));
    }
    if ell > n {
        return Err(Error::param("ell", format!("cannot poll {} of {n} nodes", ell - 1)));
    }
    if proposer.0 >= n {
        return Err(Error::param("proposer", format!("{proposer} outside network")));
    }
    if ell == 1 {
        return Ok(Vec::new());
    }
    Ok(index::sample(rng, (n - 1) as usize, (ell - 1) as usize)
        .into_iter()
        .map(|i| {
            let i = i as u32;
            NodeId(if i >= proposer.0 { i + 1 } else { i })
        })
        .collect())
}

/// Local attachment protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForkChoiceRule {
    /// Attach to the tip of the longest visible chain.
    #[default]
    Nakamoto,
}

/// Choose the parent for a new block. Ties among the deepest visible blocks
/// are broken uniformly with `rng`.
pub fn decide_parent<R: Rng + ?Sized>(
    rule: ForkChoiceRule,
    tree: &GlobalTree,
    view: &LocalView,
    rng: &mut R,
) -> BlockId {
    match rule {
        ForkChoiceRule::Nakamoto => {
            let mut best = None;
            let mut best_depth = 0;
            let mut ties = 0u32;
            for idx in (0..view.scope()).filter(|&i| view.visible[i]) {
                let d = tree.depth(idx);
                if d > best_depth {
                    best = Some(idx);
                    best_depth = d;
                    ties = 1;
                } else if d == best_depth {
                    ties += 1;
                    if rng.random_range(0..ties) == 0 {
                        best = Some(idx);
                    }
                }
            }
            best.map_or(BlockId::Genesis, |i| tree.block(i).id)
        }
    }
}

/// How polled information reaches the proposer. Durations are seconds.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PollingVariant {
    /// Requests and responses are instantaneous; the proposer decides after
    /// the configured waiting time.
    #[default]
    Instant,
    /// Each response takes `Exp(mean = response_mean)`; decide once all have
    /// arrived.
    WaitAll { response_mean: f64 },
    /// As `WaitAll`, but decide at `wait` and ignore late responses.
    FixedWait { response_mean: f64, wait: f64 },
    /// Connections are set up one after another, `setup` each. The `i`-th
    /// request leaves at `i * setup`; the proposer waits a further `wait`
    /// after the last setup and ignores responses arriving later.
    SetupFixedWait { setup: f64, response_mean: f64, wait: f64 },
}

impl PollingVariant {
    pub fn label(&self) -> &'static str {
        match self {
            PollingVariant::Instant => "instant",
            PollingVariant::WaitAll { .. } => "wait_all",
            PollingVariant::FixedWait { .. } => "fixed_wait",
            PollingVariant::SetupFixedWait { .. } => "setup_fixed_wait",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name, v: f64| {
            if v.is_nan() || v < 0.0 {
                Err(Error::param(name, format!("must be non-negative, got {v}")))
            } else {
                Ok(())
            }
        };
        match *self {
            PollingVariant::Instant => Ok(()),
            PollingVariant::WaitAll { response_mean } => check("response_mean", response_mean),
            PollingVariant::FixedWait { response_mean, wait } => {
                check("response_mean", response_mean)?;
                check("wait", wait)
            }
            PollingVariant::SetupFixedWait { setup, response_mean, wait } => {
                check("setup", setup)?;
                check("response_mean", response_mean)?;
                check("wait", wait)
            }
        }
    }

    /// Multiply every duration by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            PollingVariant::Instant => PollingVariant::Instant,
            PollingVariant::WaitAll { response_mean } => {
                PollingVariant::WaitAll { response_mean: response_mean * factor }
            }
            PollingVariant::FixedWait { response_mean, wait } => {
                PollingVariant::FixedWait { response_mean: response_mean * factor, wait: wait * factor }
            }
            PollingVariant::SetupFixedWait { setup, response_mean, wait } => PollingVariant::SetupFixedWait {
                setup: setup * factor,
                response_mean: response_mean * factor,
                wait: wait * factor,
            },
        }
    }
}

/// When instantaneous polls read the polled nodes' state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnapshotPolicy {
    /// Every contributing node is read at the decision time `γ + Δ̃`.
    #[default]
    Decision,
    /// Polled nodes are read when the request lands at `γ`; the proposer at
    /// `γ + Δ̃`.
    Request,
    /// Everyone, the proposer included, is read at `γ`.
    Election,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PollSettings {
    pub variant: PollingVariant,
    /// Proposer waiting time `Δ̃`, used by [`PollingVariant::Instant`].
    pub wait: f64,
    pub snapshot: SnapshotPolicy,
}

/// A proposer about to decide, and whom it polls.
#[derive(Debug, Clone, Copy)]
pub struct Proposal<'p> {
    pub proposer: NodeId,
    pub polled: &'p [NodeId],
    /// `γ(t)`.
    pub election_time: f64,
}

#[derive(Debug, Clone)]
pub struct PollOutcome {
    pub decision_time: f64,
    /// The proposer's own view first, then one per polled node that answered
    /// in time.
    pub views: Vec<LocalView>,
}

pub fn polling_outcome<R: Rng + ?Sized>(
    settings: &PollSettings,
    proposal: &Proposal<'_>,
    schedule: &mut ReceptionSchedule<'_>,
    tree: &GlobalTree,
    rng: &mut R,
) -> PollOutcome {
    let gamma = proposal.election_time;
    let snapshot = |node, time, schedule: &mut ReceptionSchedule<'_>| view_at(node, time, schedule, tree);
    let mut views = Vec::with_capacity(proposal.polled.len() + 1);
    // Delayed variants read the proposer at its decision time unless every
    // view is pinned to the election time.
    let own_time = |decision: f64| match settings.snapshot {
        SnapshotPolicy::Election => gamma,
        _ => decision,
    };
    let decision_time = match settings.variant {
        PollingVariant::Instant => {
            let decision = gamma + settings.wait;
            let (own_at, polled_at) = match settings.snapshot {
                SnapshotPolicy::Decision => (decision, decision),
                SnapshotPolicy::Request => (decision, gamma),
                SnapshotPolicy::Election => (gamma, gamma),
            };
            views.push(snapshot(proposal.proposer, own_at, schedule));
            for &m in proposal.polled {
                views.push(snapshot(m, polled_at, schedule));
            }
            decision
        }
        PollingVariant::WaitAll { response_mean } => {
            let mut latest: f64 = 0.0;
            let mut answers = Vec::with_capacity(proposal.polled.len());
            for &m in proposal.polled {
                latest = latest.max(scaled_exp(response_mean, rng));
                answers.push(snapshot(m, gamma, schedule));
            }
            let decision = gamma + latest;
            views.push(snapshot(proposal.proposer, own_time(decision), schedule));
            views.extend(answers);
            decision
        }
        PollingVariant::FixedWait { response_mean, wait } => {
            let mut answers = Vec::new();
            for &m in proposal.polled {
                if scaled_exp(response_mean, rng) <= wait {
                    answers.push(snapshot(m, gamma, schedule));
                }
            }
            let decision = gamma + wait;
            views.push(snapshot(proposal.proposer, own_time(decision), schedule));
            views.extend(answers);
            decision
        }
        PollingVariant::SetupFixedWait { setup, response_mean, wait } => {
            let decision = gamma + setup * proposal.polled.len() as f64 + wait;
            let mut answers = Vec::new();
            for (i, &m) in proposal.polled.iter().enumerate() {
                let sent = gamma + setup * (i + 1) as f64;
                if sent + scaled_exp(response_mean, rng) <= decision {
                    answers.push(snapshot(m, sent, schedule));
                }
            }
            views.push(snapshot(proposal.proposer, own_time(decision), schedule));
            views.extend(answers);
            decision
        }
    };
    PollOutcome { decision_time, views }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::DelayModel;
    use crate::rng::{stream, Purpose, StreamRng};
    use crate::tree::Block;

    const G: BlockId = BlockId::Genesis;
    fn b(e: u32) -> BlockId {
        BlockId::new(e, 1)
    }
    fn rng(i: u64) -> StreamRng {
        stream(9, Purpose::TieBreak, i)
    }
    fn chain(len: u32) -> GlobalTree {
        let parents: Vec<_> = (0..len).map(|e| if e == 0 { G } else { b(e) }).collect();
        GlobalTree::from_parents(1, &parents).unwrap()
    }

    #[test]
    fn missing_parent_goes_to_orphan_cache() {
        let tree = chain(3);
        let v = LocalView::from_ids(&tree, &[b(1), b(3)]).unwrap();
        assert_eq!(v.visible_ids(&tree), vec![G, b(1)]);
        assert_eq!(v.orphan_ids(&tree), vec![b(3)]);
    }

    #[test]
    fn view_at_time_zero_is_genesis_only() {
        let net = DelayModel::homogeneous(1.0).bind(10).unwrap();
        let tree = chain(3);
        let mut sched = ReceptionSchedule::new(&net, rng(0));
        let v = view_at(NodeId(5), 0.0, &mut sched, &tree);
        assert_eq!(v.visible_ids(&tree), vec![G]);
        assert!(v.orphan_ids(&tree).is_empty());
    }

    #[test]
    fn zero_delay_sees_everything() {
        let net = DelayModel::homogeneous(0.0).bind(10).unwrap();
        let tree = chain(4);
        let mut sched = ReceptionSchedule::new(&net, rng(0));
        let v = view_at(NodeId(7), 4.0, &mut sched, &tree);
        assert_eq!(v.visible_ids(&tree).len(), 5);
    }

    #[test]
    fn select_polled_edge_cases() {
        let mut r = rng(1);
        assert!(select_polled(10, 1, NodeId(0), &mut r).unwrap().is_empty());
        let mut all = select_polled(5, 5, NodeId(2), &mut r).unwrap();
        all.sort();
        assert_eq!(all, vec![NodeId(0), NodeId(1), NodeId(3), NodeId(4)]);
        assert!(select_polled(3, 4, NodeId(0), &mut r).is_err());
    }

    #[test]
    fn select_polled_is_uniform() {
        let n = 10_000u32;
        let draws = 100_000;
        let proposer = NodeId(1234);
        let mut counts = vec![0u32; n as usize];
        let mut r = rng(2);
        for _ in 0..draws {
            for m in select_polled(n, 4, proposer, &mut r).unwrap() {
                counts[m.index()] += 1;
            }
        }
        assert_eq!(counts[proposer.index()], 0);
        // Each node is hit with probability 3/(n-1) per draw. With ~10^4
        // counts, a per-node 3-sigma check would fail by chance somewhere, so
        // check the pooled chi-square instead, plus a generous per-node band.
        let p = 3.0 / (n - 1) as f64;
        let expect = draws as f64 * p;
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        let chi2: f64 = counts
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != proposer.index())
            .map(|(_, &c)| (c as f64 - expect).powi(2) / expect)
            .sum();
        let dof = (n - 2) as f64;
        assert!((chi2 - dof).abs() < 3.0 * (2.0 * dof).sqrt(), "chi2 {chi2}");
        let worst = counts
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != proposer.index())
            .map(|(_, &c)| (c as f64 - expect).abs() / sd)
            .fold(0.0, f64::max);
        assert!(worst < 5.5, "worst deviation {worst} sd");
    }

    #[test]
    fn merge_laws() {
        let tree = chain(3);
        let v = LocalView::from_ids(&tree, &[b(1), b(3)]).unwrap();
        let g = LocalView::empty(tree.len());
        assert_eq!(merge_views(&tree, &[v.clone(), v.clone()]), v);
        assert_eq!(merge_views(&tree, &[v.clone(), g]), v);
    }

    #[test]
    fn merge_resolves_orphans_across_views() {
        let tree = chain(2);
        let a = LocalView::from_ids(&tree, &[b(1)]).unwrap();
        let only_two = LocalView::from_ids(&tree, &[b(2)]).unwrap();
        assert_eq!(only_two.orphan_ids(&tree), vec![b(2)]);
        let m = merge_views(&tree, &[a, only_two]);
        assert_eq!(m.visible_ids(&tree), vec![G, b(1), b(2)]);
    }

    #[test]
    fn decide_parent_basics() {
        let tree = chain(2);
        let mut r = rng(3);
        let g = LocalView::empty(tree.len());
        assert_eq!(decide_parent(ForkChoiceRule::Nakamoto, &tree, &g, &mut r), G);
        let full = LocalView::from_ids(&tree, &[b(1), b(2)]).unwrap();
        assert_eq!(decide_parent(ForkChoiceRule::Nakamoto, &tree, &full, &mut r), b(2));
    }

    #[test]
    fn ties_break_evenly() {
        // 1.1 <- 2.1 and 1.1 <- 3.1 are both depth two.
        let tree = GlobalTree::from_parents(1, &[G, b(1), b(1)]).unwrap();
        let view = LocalView::from_ids(&tree, &[b(1), b(2), b(3)]).unwrap();
        let mut r = rng(4);
        let picks = 10_000;
        let second =
            (0..picks).filter(|_| decide_parent(ForkChoiceRule::Nakamoto, &tree, &view, &mut r) == b(2)).count();
        let freq = second as f64 / picks as f64;
        assert!((freq - 0.5).abs() < 0.02, "{freq}");
    }

    #[test]
    fn decision_depends_on_structure_only() {
        // Same structure, different proposers and times.
        let a = GlobalTree::from_parents(1, &[G, b(1), G, b(3)]).unwrap();
        let mut c = GlobalTree::new(1);
        for (e, parent) in [(1, G), (2, b(1)), (3, G), (4, b(3))] {
            c.begin_epoch(e as f64 + 0.5).unwrap();
            c.push(Block { id: b(e), parent, proposer: NodeId(40 - e), decision_time: e as f64 + 0.7 }).unwrap();
        }
        let ids = [b(1), b(2), b(3), b(4)];
        let va = LocalView::from_ids(&a, &ids).unwrap();
        let vc = LocalView::from_ids(&c, &ids).unwrap();
        for seed in 0..20 {
            assert_eq!(
                decide_parent(ForkChoiceRule::Nakamoto, &a, &va, &mut rng(seed)),
                decide_parent(ForkChoiceRule::Nakamoto, &c, &vc, &mut rng(seed))
            );
        }
    }

    #[test]
    fn truncation_examples() {
        let tree = chain(5);
        let full = LocalView::from_ids(&tree, &[b(1), b(2), b(3), b(4), b(5)]).unwrap();
        let everything = truncate_view(&tree, &full, 6, 6).unwrap();
        assert_eq!(everything, full);
        let last = truncate_view(&tree, &full, 6, 1).unwrap();
        assert_eq!(last.orphan_ids(&tree), vec![b(5)]);
        let payload = truncate_view(&tree, &full, 6, 2).unwrap();
        let requester = LocalView::empty(tree.len());
        let merged = merge_views(&tree, &[requester, payload]);
        assert_eq!(merged.visible_ids(&tree), vec![G]);
        assert_eq!(merged.orphan_ids(&tree), vec![b(4), b(5)]);
        // A requester holding the older part recovers the whole chain.
        let knows_three = LocalView::from_ids(&tree, &[b(1), b(2), b(3)]).unwrap();
        let payload = truncate_view(&tree, &full, 6, 2).unwrap();
        assert_eq!(merge_views(&tree, &[knows_three, payload]), full);
        assert!(truncate_view(&tree, &full, 6, 0).is_err());
    }

    fn settings(variant: PollingVariant) -> PollSettings {
        PollSettings { variant, wait: 0.0, snapshot: SnapshotPolicy::Decision }
    }

    #[test]
    fn instant_without_polling_is_own_view() {
        let net = DelayModel::homogeneous(1.0).bind(20).unwrap();
        let tree = chain(3);
        let mut sched = ReceptionSchedule::new(&net, rng(5));
        let s = PollSettings { variant: PollingVariant::Instant, wait: 0.25, snapshot: SnapshotPolicy::Decision };
        let p = Proposal { proposer: NodeId(3), polled: &[], election_time: 4.0 };
        let out = polling_outcome(&s, &p, &mut sched, &tree, &mut rng(6));
        assert_eq!(out.decision_time, 4.25);
        assert_eq!(out.views.len(), 1);
        let own = view_at(NodeId(3), 4.25, &mut sched, &tree);
        assert_eq!(out.views[0], own);
    }

    #[test]
    fn fixed_wait_zero_drops_every_response() {
        let net = DelayModel::homogeneous(1.0).bind(20).unwrap();
        let tree = chain(3);
        let mut sched = ReceptionSchedule::new(&net, rng(5));
        let polled = [NodeId(1), NodeId(2), NodeId(4)];
        let p = Proposal { proposer: NodeId(3), polled: &polled, election_time: 4.0 };
        let s = settings(PollingVariant::FixedWait { response_mean: 0.1, wait: 0.0 });
        let out = polling_outcome(&s, &p, &mut sched, &tree, &mut rng(6));
        assert_eq!(out.views.len(), 1);
        assert_eq!(out.decision_time, 4.0);
    }

    #[test]
    fn wait_all_lag_is_max_of_exponentials() {
        let net = DelayModel::homogeneous(1.0).bind(20).unwrap();
        let tree = chain(1);
        let delta = 1.0;
        let polled = [NodeId(1), NodeId(2), NodeId(4)];
        let s = settings(PollingVariant::WaitAll { response_mean: 0.1 * delta });
        let mut r = rng(7);
        let trials = 100_000;
        let mut total = 0.0;
        for _ in 0..trials {
            let mut sched = ReceptionSchedule::new(&net, rng(8));
            let p = Proposal { proposer: NodeId(3), polled: &polled, election_time: 2.0 };
            total += polling_outcome(&s, &p, &mut sched, &tree, &mut r).decision_time - 2.0;
        }
        let mean = total / trials as f64;
        let expect = 0.1 * delta * (1.0 + 0.5 + 1.0 / 3.0);
        assert!((mean / expect - 1.0).abs() < 0.02, "{mean} vs {expect}");
    }

    #[test]
    fn setup_variant_timing() {
        let net = DelayModel::homogeneous(1.0).bind(20).unwrap();
        let tree = chain(2);
        let polled = [NodeId(1), NodeId(2)];
        let p = Proposal { proposer: NodeId(3), polled: &polled, election_time: 3.0 };
        // Zero response delay: both answer, decision after setups plus wait.
        let s = settings(PollingVariant::SetupFixedWait { setup: 0.5, response_mean: 0.0, wait: 0.25 });
        let mut sched = ReceptionSchedule::new(&net, rng(9));
        let out = polling_outcome(&s, &p, &mut sched, &tree, &mut rng(10));
        assert_eq!(out.decision_time, 4.25);
        assert_eq!(out.views.len(), 3);
        assert_eq!(out.views[2], view_at(NodeId(2), 4.0, &mut sched, &tree));
    }

    #[test]
    fn scaling_multiplies_all_durations() {
        let v = PollingVariant::SetupFixedWait { setup: 0.01, response_mean: 0.1, wait: 0.1 };
        assert_eq!(v.scaled(2.0), PollingVariant::SetupFixedWait { setup: 0.02, response_mean: 0.2, wait: 0.2 });
        assert!(PollingVariant::WaitAll { response_mean: -1.0 }.validate().is_err());
    }
}
