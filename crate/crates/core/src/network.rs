//! Node labels and qubit-to-node partitions.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NodeLabel(pub String);

impl NodeLabel {
    pub fn new(name: impl Into<String>) -> Self {
        Self(name.into())
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeLabel {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// Disjoint blocks covering qubits `0..n`; block `k` is node `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    owner: Vec<usize>,
}

impl Partition {
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut owner = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidSubsystems(format!("block {b} is empty")));
            }
            for &q in block {
                if q >= n || owner[q] != usize::MAX {
                    return Err(Error::InvalidSubsystems(format!("qubit {q} repeated or out of range")));
                }
                owner[q] = b;
            }
        }
        Ok(Self { blocks, owner })
    }

    /// Contiguous blocks of the given sizes.
    pub fn contiguous(sizes: &[usize]) -> Result<Self> {
        let mut next = 0;
        let blocks = sizes
            .iter()
            .map(|&s| {
                let b = (next..next + s).collect();
                next += s;
                b
            })
            .collect();
        Self::new(blocks)
    }

    /// One qubit per node.
    pub fn singletons(n: usize) -> Self {
        Self::contiguous(&vec![1; n]).expect("singleton partition")
    }

    pub fn num_qubits(&self) -> usize {
        self.owner.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn node_of(&self, qubit: usize) -> Option<usize> {
        self.owner.get(qubit).copied()
    }

    /// True if every block of `self` lies inside one block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.num_qubits() == coarser.num_qubits()
            && self.blocks.iter().all(|b| b.iter().all(|&q| coarser.owner[q] == coarser.owner[b[0]]))
    }

    /// Splits block `index` into `head` and the remaining qubits.
    pub fn split_block(&self, index: usize, head: &[usize]) -> Result<Partition> {
        let block = self.blocks.get(index).ok_or_else(|| Error::Domain(format!("no block {index}")))?;
        let rest: Vec<usize> = block.iter().copied().filter(|q| !head.contains(q)).collect();
        if rest.len() + head.len() != block.len() {
            return Err(Error::InvalidSubsystems("head is not a subset of the block".into()));
        }
        let mut blocks = self.blocks.clone();
        blocks[index] = head.to_vec();
        blocks.push(rest);
        Partition::new(blocks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contiguous_assigns_owners() {
        let p = Partition::contiguous(&[2, 1]).unwrap();
        assert_eq!(p.node_of(1), Some(0));
        assert_eq!(p.node_of(2), Some(1));
    }

    #[test]
    fn overlapping_blocks_are_rejected() {
        assert!(Partition::new(vec![vec![0, 1], vec![1]]).is_err());
        assert!(Partition::new(vec![vec![0], vec![]]).is_err());
    }

    #[test]
    fn split_refines() {
        let p = Partition::contiguous(&[3, 1]).unwrap();
        let q = p.split_block(0, &[0]).unwrap();
        assert!(q.refines(&p));
        assert!(!p.refines(&q));
    }
}
