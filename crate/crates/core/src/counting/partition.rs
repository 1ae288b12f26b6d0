use num_bigint::BigInt;
use num_traits::One;

use crate::structures::Structure;

use super::CountError;

/// A set partition of `0..n`, blocks sorted by their least element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    n: usize,
}

impl Partition {
    /// Validates and normalises `blocks` as a partition of `0..n`.
    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, CountError> {
        let mut seen = vec![false; n];
        let mut blocks: Vec<Vec<usize>> = blocks;
        for b in &mut blocks {
            if b.is_empty() {
                return Err(CountError::InvalidPartition("empty block".into()));
            }
            b.sort_unstable();
            for &v in b.iter() {
                if v >= n || seen[v] {
                    return Err(CountError::InvalidPartition(format!(
                        "element {v} is repeated or outside 0..{n}"
                    )));
                }
                seen[v] = true;
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(CountError::InvalidPartition(format!("element {v} is not covered")));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Partition { blocks, n })
    }

    /// From a restricted-growth string: `rgs[v]` is the block of `v`.
    pub fn from_rgs(rgs: &[usize]) -> Self {
        let count = rgs.iter().map(|&b| b + 1).max().unwrap_or(0);
        let mut blocks = vec![Vec::new(); count];
        for (v, &b) in rgs.iter().enumerate() {
            blocks[b].push(v);
        }
        Partition {
            blocks,
            n: rgs.len(),
        }
    }

    /// All singletons.
    pub fn discrete(n: usize) -> Self {
        Partition {
            blocks: (0..n).map(|v| vec![v]).collect(),
            n,
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Size of the partitioned set.
    pub fn ground_size(&self) -> usize {
        self.n
    }

    /// Block index of each element.
    pub fn block_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (i, b) in self.blocks.iter().enumerate() {
            for &v in b {
                out[v] = i;
            }
        }
        out
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.n
    }
}

/// Lazily enumerates all partitions of `0..n` via restricted-growth strings.
pub fn partitions(n: usize) -> Partitions {
    Partitions {
        rgs: vec![0; n],
        done: false,
    }
}

pub struct Partitions {
    rgs: Vec<usize>,
    done: bool,
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let out = Partition::from_rgs(&self.rgs);
        // Advance: bump the rightmost entry that may still grow.
        let n = self.rgs.len();
        let mut prefix_max = vec![0; n];
        for i in 1..n {
            prefix_max[i] = prefix_max[i - 1].max(self.rgs[i - 1]);
        }
        self.done = true;
        for i in (1..n).rev() {
            if self.rgs[i] <= prefix_max[i] {
                self.rgs[i] += 1;
                for slot in &mut self.rgs[i + 1..] {
                    *slot = 0;
                }
                self.done = false;
                break;
            }
        }
        Some(out)
    }
}

/// `F/Θ`: one vertex per block; a tuple holds when some preimage does.
pub fn quotient(pattern: &Structure, theta: &Partition) -> Result<Structure, CountError> {
    if theta.ground_size() != pattern.domain_size() {
        return Err(CountError::InvalidPartition(format!(
            "partition of {} elements applied to a structure with {} vertices",
            theta.ground_size(),
            pattern.domain_size()
        )));
    }
    let map = theta.block_of();
    let mut out = Structure::empty(pattern.signature().clone(), theta.block_count());
    for (r, rel) in pattern.relations().iter().enumerate() {
        for t in rel {
            out.insert(r, t.iter().map(|&v| map[v]).collect())
                .expect("image tuple stays in range");
        }
    }
    Ok(out)
}

/// `μ(0, Θ) = Π_I (−1)^{|I|−1} (|I|−1)!` in the partition lattice.
pub fn mobius(theta: &Partition) -> BigInt {
    let mut out = BigInt::one();
    for b in theta.blocks() {
        let k = b.len() - 1;
        for i in 2..=k {
            out *= i;
        }
        if k % 2 == 1 {
            out = -out;
        }
    }
    out
}
