//! Hierarchical block partition of the input index range.
//!
//! Level 1 splits the expected input into blocks of `ceil(n / p)` elements.
//! Every level-`i` block is split again into sub-blocks of
//! `ceil(size(i-1) / p)` elements laid out from the parent's start, the last
//! one possibly shorter. A block therefore never has more than `p` children
//! and boundaries at level `i` are always boundaries at every deeper level.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionGeometry {
    n_expect: u64,
    p: u64,
    depth: usize,
    /// `sizes[i - 1]` is the block size at level `i`.
    sizes: Vec<u64>,
}

/// Smallest `m` with `p^m >= n`.
fn ceil_log(n: u64, p: u64) -> u32 {
    let mut m = 0;
    let mut pow: u128 = 1;
    while pow < n as u128 {
        pow *= p as u128;
        m += 1;
    }
    m
}

impl PartitionGeometry {
    pub fn new(n_expect: u64, p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidParameter(format!(
                "space parameter p = {p} < 2"
            )));
        }
        if n_expect == 0 {
            return Err(Error::InvalidParameter(
                "expected input size must be positive".into(),
            ));
        }
        let depth = (ceil_log(n_expect, p) as usize).saturating_sub(1).max(1);
        let mut sizes = Vec::with_capacity(depth);
        let mut size = n_expect.div_ceil(p);
        for _ in 0..depth {
            sizes.push(size);
            size = size.div_ceil(p);
        }
        Ok(PartitionGeometry {
            n_expect,
            p,
            depth,
            sizes,
        })
    }

    pub fn n_expect(&self) -> u64 {
        self.n_expect
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Number of levels `h`.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Elements per block at `level` (1-based).
    pub fn block_size(&self, level: usize) -> u64 {
        self.sizes[level - 1]
    }

    /// Zero-based offset of the first index of the level-`level` block that
    /// contains `index`. Two indices share a block at a level iff their
    /// starts agree. Indices past `n_expect` continue in level-1 blocks of
    /// unchanged size.
    pub fn block_start(&self, level: usize, index: u64) -> u64 {
        let offset = index - 1;
        let mut start = offset - offset % self.sizes[0];
        let mut rest = offset % self.sizes[0];
        for &size in &self.sizes[1..level] {
            start += rest - rest % size;
            rest %= size;
        }
        start
    }

    /// Shallowest level in `from..=depth` at which `a` and `b` lie in
    /// different blocks.
    pub fn first_split(&self, from: usize, a: u64, b: u64) -> Option<usize> {
        (from..=self.depth).find(|&l| self.block_start(l, a) != self.block_start(l, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn depth_for_million_base_ten() {
        let g = PartitionGeometry::new(1 << 20, 10).unwrap();
        assert_eq!(g.depth(), 6);
    }

    #[test]
    fn depth_clamps_to_one() {
        let g = PartitionGeometry::new(1024, 1024).unwrap();
        assert_eq!(g.depth(), 1);
        assert_eq!(g.block_size(1), 1);
    }

    #[test]
    fn binary_partition_of_a_million() {
        let g = PartitionGeometry::new(1_000_000, 2).unwrap();
        assert_eq!(g.depth(), 19);
        assert_eq!(g.block_size(1), 500_000);
    }

    #[test]
    fn sixteen_by_two() {
        let g = PartitionGeometry::new(16, 2).unwrap();
        assert_eq!(g.depth(), 3);
        assert_eq!(
            (g.block_size(1), g.block_size(2), g.block_size(3)),
            (8, 4, 2)
        );
        assert_eq!(g.first_split(2, 2, 3), Some(3));
        assert_eq!(g.first_split(1, 8, 9), Some(1));
        assert_eq!(g.first_split(2, 1, 2), None);
    }

    #[test]
    fn rejects_small_p() {
        assert!(matches!(
            PartitionGeometry::new(10, 1),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn uneven_sizes_still_nest() {
        // 10 -> sub-blocks of 4: [0,4) [4,8) [8,10); a plain modulo on 4 would
        // put offset 8 and offset 10 in one block across a parent boundary.
        let g = PartitionGeometry::new(30, 3).unwrap();
        assert_eq!(g.block_size(1), 10);
        assert_eq!(g.block_size(2), 4);
        assert_eq!(g.block_start(2, 11), 10);
        assert_eq!(g.block_start(2, 9), 8);
    }

    proptest! {
        #[test]
        fn geometry_invariants(n in 1u64..5_000_000, p in 2u64..600) {
            let g = PartitionGeometry::new(n, p).unwrap();
            let h = g.depth();
            prop_assert!(g.block_size(h) <= p);
            prop_assert_eq!(g.block_size(1), n.div_ceil(p));
            for l in 2..=h {
                prop_assert!(g.block_size(l) <= g.block_size(l - 1));
                prop_assert!(g.block_size(l) * p >= g.block_size(l - 1));
            }
        }

        #[test]
        fn boundaries_nest(n in 2u64..20_000, p in 2u64..40, a in 1u64..20_000, gap in 1u64..500) {
            let g = PartitionGeometry::new(n, p).unwrap();
            let b = a + gap;
            // Sharing a deep block implies sharing every shallower one, and
            // a block never holds more than p children.
            for l in 1..=g.depth() {
                if g.block_start(l, a) == g.block_start(l, b) {
                    for s in 1..l {
                        prop_assert_eq!(g.block_start(s, a), g.block_start(s, b));
                    }
                }
                if l > 1 {
                    let parent = g.block_start(l - 1, a);
                    let child = g.block_start(l, a);
                    prop_assert!(child >= parent);
                    prop_assert!((child - parent) / g.block_size(l) < p);
                }
            }
        }
    }
}
