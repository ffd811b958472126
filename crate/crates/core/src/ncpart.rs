//! Non-crossing partitions of `{1..n}`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Default ceiling for [`enumerate_nc`].
pub const DEFAULT_NC_CEILING: usize = 16;

/// A non-crossing partition; blocks are sorted and ordered by their minimum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct NonCrossingPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl NonCrossingPartition {
    /// Validates and normalizes `blocks` (1-based elements).
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let blocks = normalize(n, blocks)?;
        if has_crossing(&blocks) {
            return Err(Error::NotAPartition("blocks cross".into()));
        }
        Ok(NonCrossingPartition { n, blocks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().map(Vec::len)
    }
}

/// `n`-th Catalan number.
pub fn catalan(n: usize) -> u64 {
    let mut c: u64 = 1;
    for k in 0..n as u64 {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    c
}

/// Checks that `blocks` form a set partition of `{1..n}` and sorts them.
fn normalize(n: usize, blocks: Vec<Vec<usize>>) -> Result<Vec<Vec<usize>>> {
    let mut seen = vec![false; n + 1];
    let mut out = Vec::with_capacity(blocks.len());
    for mut b in blocks {
        if b.is_empty() {
            return Err(Error::NotAPartition("empty block".into()));
        }
        b.sort_unstable();
        for &x in &b {
            if x == 0 || x > n {
                return Err(Error::NotAPartition(format!("element {x} outside 1..={n}")));
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::NotAPartition(format!("element {x} appears twice")));
            }
        }
        out.push(b);
    }
    if let Some(missing) = (1..=n).find(|&x| !seen[x]) {
        return Err(Error::NotAPartition(format!("element {missing} missing")));
    }
    out.sort_by_key(|b| b[0]);
    Ok(out)
}

fn has_crossing(blocks: &[Vec<usize>]) -> bool {
    for (r, br) in blocks.iter().enumerate() {
        for bs in &blocks[r + 1..] {
            // i1 < j1 < i2 < j2 with i's in one block and j's in the other
            for &i1 in br {
                for &j1 in bs.iter().filter(|&&j| j > i1) {
                    for &i2 in br.iter().filter(|&&i| i > j1) {
                        if bs.iter().any(|&j2| j2 > i2) {
                            return true;
                        }
                    }
                }
            }
            for &j1 in bs {
                for &i1 in br.iter().filter(|&&i| i > j1) {
                    for &j2 in bs.iter().filter(|&&j| j > i1) {
                        if br.iter().any(|&i2| i2 > j2) {
                            return true;
                        }
                    }
                }
            }
        }
    }
    false
}

/// True iff the set partition `blocks` of `{1..n}` has no crossing quadruple.
pub fn is_noncrossing(n: usize, blocks: &[Vec<usize>]) -> Result<bool> {
    let blocks = normalize(n, blocks.to_vec())?;
    Ok(!has_crossing(&blocks))
}

/// All non-crossing partitions of `{1..n}` with the default ceiling.
pub fn enumerate_nc(n: usize) -> Result<Vec<NonCrossingPartition>> {
    enumerate_nc_with_ceiling(n, DEFAULT_NC_CEILING)
}

pub fn enumerate_nc_with_ceiling(n: usize, ceiling: usize) -> Result<Vec<NonCrossingPartition>> {
    if n == 0 || n > ceiling {
        return Err(Error::SizeLimitExceeded { n, ceiling });
    }
    let mut out: Vec<NonCrossingPartition> = partitions_of_range(1, n)
        .into_iter()
        .map(|mut blocks| {
            blocks.sort_by_key(|b| b[0]);
            NonCrossingPartition { n, blocks }
        })
        .collect();
    out.sort_by(|a, b| a.blocks.cmp(&b.blocks));
    Ok(out)
}

/// Non-crossing partitions of the interval `lo..=hi`: pick the block through
/// `lo`; the gaps it leaves are partitioned independently.
fn partitions_of_range(lo: usize, hi: usize) -> Vec<Vec<Vec<usize>>> {
    if lo > hi {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    grow_first_block(vec![lo], hi, vec![Vec::new()], &mut out);
    out
}

fn grow_first_block(
    block: Vec<usize>,
    hi: usize,
    inner: Vec<Vec<Vec<usize>>>,
    out: &mut Vec<Vec<Vec<usize>>>,
) {
    let last = *block.last().expect("block is nonempty");
    // close the block: everything after `last` is an independent tail
    for tail in partitions_of_range(last + 1, hi) {
        for acc in &inner {
            let mut p = acc.clone();
            p.push(block.clone());
            p.extend(tail.iter().cloned());
            out.push(p);
        }
    }
    for next in last + 1..=hi {
        let gap = partitions_of_range(last + 1, next - 1);
        let mut extended = Vec::with_capacity(inner.len() * gap.len());
        for acc in &inner {
            for g in &gap {
                let mut p = acc.clone();
                p.extend(g.iter().cloned());
                extended.push(p);
            }
        }
        let mut b = block.clone();
        b.push(next);
        grow_first_block(b, hi, extended, out);
    }
}
