use crate::stack::Data;

/// Constant-size summary of a folded block.
///
/// `bottom` is the lowest surviving entry (with its restart snapshot) and
/// `top` holds up to `k` of the highest survivors above it, bottom to top.
/// When the block has at most `k + 1` survivors, `bottom` and `top` together
/// are the whole block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSignature<P, C> {
    pub(crate) level: usize,
    pub(crate) first_index: u64,
    pub(crate) last_index: u64,
    pub(crate) len: u64,
    pub(crate) bottom: Data<P, C>,
    pub(crate) top: Vec<Data<P, C>>,
}

impl<P: Clone, C: Clone> BlockSignature<P, C> {
    /// Partition level of the summarized block.
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn first_index(&self) -> u64 {
        self.first_index
    }

    pub fn last_index(&self) -> u64 {
        self.last_index
    }

    /// Surviving entries represented.
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bottom(&self) -> &Data<P, C> {
        &self.bottom
    }

    pub fn top(&self) -> &[Data<P, C>] {
        &self.top
    }

    fn is_complete(&self) -> bool {
        self.top.len() as u64 + 1 == self.len
    }

    /// Appends this block's highest survivors, top first, until `out`
    /// holds `want` entries.
    pub(crate) fn collect_top(&self, want: usize, out: &mut Vec<Data<P, C>>) {
        for d in self.top.iter().rev() {
            if out.len() >= want {
                return;
            }
            out.push(d.clone());
        }
        if out.len() < want && self.is_complete() {
            out.push(self.bottom.clone());
        }
    }

    pub(crate) fn records(&self) -> u64 {
        1 + self.top.len() as u64
    }
}
