//! Blocks, the global blocktree and its canonical shape encoding.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a node in the network, `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Identity of a block: the genesis sentinel, or `(epoch, slot)` with
/// `epoch >= 1` and `slot` in `1..=k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockId {
    Genesis,
    Proposed { epoch: u32, slot: u32 },
}

impl BlockId {
    pub fn new(epoch: u32, slot: u32) -> Self {
        debug_assert!(epoch >= 1 && slot >= 1);
        BlockId::Proposed { epoch, slot }
    }

    pub fn epoch(self) -> Option<u32> {
        match self {
            BlockId::Genesis => None,
            BlockId::Proposed { epoch, .. } => Some(epoch),
        }
    }

    pub fn slot(self) -> Option<u32> {
        match self {
            BlockId::Genesis => None,
            BlockId::Proposed { slot, .. } => Some(slot),
        }
    }

    pub fn is_genesis(self) -> bool {
        matches!(self, BlockId::Genesis)
    }
}

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockId::Genesis => f.write_str("G"),
            BlockId::Proposed { epoch, slot } => write!(f, "{epoch}.{slot}"),
        }
    }
}

impl FromStr for BlockId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "G" {
            return Ok(BlockId::Genesis);
        }
        let bad = || Error::param("block id", format!("cannot parse `{s}`"));
        let (e, sl) = s.split_once('.').ok_or_else(bad)?;
        let epoch: u32 = e.parse().map_err(|_| bad())?;
        let slot: u32 = sl.parse().map_err(|_| bad())?;
        if epoch == 0 || slot == 0 {
            return Err(bad());
        }
        Ok(BlockId::new(epoch, slot))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub id: BlockId,
    pub parent: BlockId,
    pub proposer: NodeId,
    /// When the proposer fixed the parent and broadcast the block.
    pub decision_time: f64,
}

/// Every proposed block plus the implicit genesis root.
///
/// Blocks are stored in `(epoch, slot)` order, so the dense index of
/// `(epoch, slot)` is `(epoch - 1) * k + slot - 1`. Parents always come from
/// an earlier epoch, which keeps the structure acyclic by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalTree {
    k: u32,
    blocks: Vec<Block>,
    parent_idx: Vec<Option<usize>>,
    depth: Vec<u32>,
    arrivals: Vec<f64>,
}

impl GlobalTree {
    pub fn new(k: u32) -> Self {
        assert!(k >= 1, "k must be positive");
        GlobalTree { k, blocks: Vec::new(), parent_idx: Vec::new(), depth: Vec::new(), arrivals: Vec::new() }
    }

    /// Build a tree from `(block, parent)` pairs. Proposers and times are
    /// filled with placeholders; handy for structural tests.
    pub fn from_parents(k: u32, parents: &[BlockId]) -> Result<Self> {
        let mut tree = GlobalTree::new(k);
        for (i, &parent) in parents.iter().enumerate() {
            let epoch = (i as u32) / k + 1;
            let slot = (i as u32) % k + 1;
            if slot == 1 {
                tree.begin_epoch(epoch as f64)?;
            }
            tree.push(Block {
                id: BlockId::new(epoch, slot),
                parent,
                proposer: NodeId(i as u32),
                decision_time: epoch as f64,
            })?;
        }
        Ok(tree)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of proposed blocks (genesis excluded).
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Epochs that have at least begun.
    pub fn epochs(&self) -> u32 {
        self.arrivals.len() as u32
    }

    pub fn arrivals(&self) -> &[f64] {
        &self.arrivals
    }

    /// `γ(epoch)`.
    pub fn arrival(&self, epoch: u32) -> f64 {
        self.arrivals[epoch as usize - 1]
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, idx: usize) -> &Block {
        &self.blocks[idx]
    }

    pub fn index_of(&self, id: BlockId) -> Option<usize> {
        match id {
            BlockId::Genesis => None,
            BlockId::Proposed { epoch, slot } => {
                if slot > self.k {
                    return None;
                }
                let idx = ((epoch - 1) * self.k + slot - 1) as usize;
                (idx < self.blocks.len()).then_some(idx)
            }
        }
    }

    pub fn get(&self, id: BlockId) -> Option<&Block> {
        self.index_of(id).map(|i| &self.blocks[i])
    }

    /// Dense index of the parent, `None` for genesis.
    pub fn parent_index(&self, idx: usize) -> Option<usize> {
        self.parent_idx[idx]
    }

    /// Hop distance from genesis.
    pub fn depth(&self, idx: usize) -> u32 {
        self.depth[idx]
    }

    /// Number of blocks belonging to epochs strictly before `epoch`.
    pub fn blocks_before(&self, epoch: u32) -> usize {
        (((epoch.saturating_sub(1)) * self.k) as usize).min(self.blocks.len())
    }

    /// Record `γ` for the next epoch. Must be strictly increasing.
    pub fn begin_epoch(&mut self, arrival: f64) -> Result<()> {
        if let Some(&last) = self.arrivals.last() {
            if arrival <= last {
                return Err(Error::param("arrival", "arrival times must be strictly increasing"));
            }
        }
        if self.blocks.len() != self.arrivals.len() * self.k as usize {
            return Err(Error::param("epoch", "previous epoch is incomplete"));
        }
        self.arrivals.push(arrival);
        Ok(())
    }

    /// Append the next block in `(epoch, slot)` order.
    pub fn push(&mut self, block: Block) -> Result<()> {
        let idx = self.blocks.len();
        let expect = BlockId::new(idx as u32 / self.k + 1, idx as u32 % self.k + 1);
        if block.id != expect {
            return Err(Error::param("block", format!("expected {expect}, got {}", block.id)));
        }
        let epoch = expect.epoch().unwrap_or_default();
        if epoch > self.epochs() {
            return Err(Error::param("block", format!("epoch {epoch} has not begun")));
        }
        let parent_idx = match block.parent {
            BlockId::Genesis => None,
            p => {
                if p.epoch() >= Some(epoch) {
                    return Err(Error::param("parent", format!("{p} is not older than {}", block.id)));
                }
                Some(self.index_of(p).ok_or_else(|| Error::param("parent", format!("{p} unknown")))?)
            }
        };
        self.depth.push(parent_idx.map_or(1, |p| self.depth[p] + 1));
        self.parent_idx.push(parent_idx);
        self.blocks.push(block);
        Ok(())
    }

    /// `L(G_t)`: hops from genesis to the deepest leaf; 0 for genesis alone.
    pub fn longest_chain(&self) -> u32 {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn shape(&self) -> TreeShape {
        TreeShape(self.blocks.iter().map(|b| b.parent).collect())
    }
}

pub fn longest_chain_length(tree: &GlobalTree) -> u32 {
    tree.longest_chain()
}

pub fn shape_of(tree: &GlobalTree) -> TreeShape {
    tree.shape()
}

/// Canonical structure code: the parent of every block in `(epoch, slot)`
/// order. Proposers and times are not part of it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeShape(pub Vec<BlockId>);

impl TreeShape {
    pub fn parents(&self) -> &[BlockId] {
        &self.0
    }
}

impl fmt::Display for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for TreeShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Ok(TreeShape(Vec::new()));
        }
        s.split(',').map(str::parse).collect::<Result<_>>().map(TreeShape)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const G: BlockId = BlockId::Genesis;
    fn b(e: u32) -> BlockId {
        BlockId::new(e, 1)
    }

    #[test]
    fn genesis_is_a_sentinel() {
        assert_eq!(G, G);
        assert_ne!(G, b(1));
        assert_eq!(G.epoch(), None);
        assert_eq!(G.slot(), None);
    }

    #[test]
    fn chain_shapes_from_small_examples() {
        let chain = GlobalTree::from_parents(1, &[G, b(1), b(2)]).unwrap();
        assert_eq!(chain.longest_chain(), 3);
        assert_eq!(chain.shape().to_string(), "G,1.1,2.1");

        let fork = GlobalTree::from_parents(1, &[G, b(1), b(1)]).unwrap();
        assert_eq!(fork.longest_chain(), 2);

        let side = GlobalTree::from_parents(1, &[G, b(1), G]).unwrap();
        assert_eq!(side.longest_chain(), 2);
        assert_eq!(side.shape().to_string(), "G,1.1,G");
    }

    #[test]
    fn genesis_only_tree_has_zero_length() {
        assert_eq!(GlobalTree::new(3).longest_chain(), 0);
    }

    #[test]
    fn rejects_parent_from_same_epoch() {
        let mut tree = GlobalTree::new(2);
        tree.begin_epoch(1.0).unwrap();
        let blk = |slot, parent| Block { id: BlockId::new(1, slot), parent, proposer: NodeId(0), decision_time: 1.0 };
        tree.push(blk(1, G)).unwrap();
        assert!(tree.push(blk(2, BlockId::new(1, 1))).is_err());
    }

    #[test]
    fn rejects_non_increasing_arrivals() {
        let mut tree = GlobalTree::new(1);
        tree.begin_epoch(2.0).unwrap();
        tree.push(Block { id: b(1), parent: G, proposer: NodeId(0), decision_time: 2.0 }).unwrap();
        assert!(tree.begin_epoch(2.0).is_err());
    }

    #[test]
    fn shape_ignores_proposers_and_times() {
        let a = GlobalTree::from_parents(1, &[G, b(1), G]).unwrap();
        let mut other = GlobalTree::new(1);
        for (e, parent) in [(1, G), (2, b(1)), (3, G)] {
            other.begin_epoch(e as f64 * 1.7).unwrap();
            other.push(Block { id: b(e), parent, proposer: NodeId(99 - e), decision_time: e as f64 * 2.0 }).unwrap();
        }
        assert_eq!(a.shape(), other.shape());
    }

    #[test]
    fn shape_text_parses_back() {
        let s = TreeShape(vec![G, G, BlockId::new(1, 2), BlockId::new(1, 1)]);
        assert_eq!(s.to_string().parse::<TreeShape>().unwrap(), s);
        assert!("G,0.1".parse::<TreeShape>().is_err());
    }

    #[test]
    fn k_two_indexing() {
        let tree = GlobalTree::from_parents(2, &[G, G, BlockId::new(1, 2), G]).unwrap();
        assert_eq!(tree.index_of(BlockId::new(2, 1)), Some(2));
        assert_eq!(tree.parent_index(2), Some(1));
        assert_eq!(tree.blocks_before(2), 2);
        assert_eq!(tree.longest_chain(), 2);
    }
}
