use crate::rate::Rate;

/// One horizontal slice of rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub row_start: usize,
    pub row_count: usize,
}

/// Partition of `0..total_rows` into contiguous blocks whose heights differ
/// by at most one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPlan {
    pub total_rows: usize,
    pub target_height: usize,
    pub blocks: Vec<Block>,
}

/// Block height suited to `cols` columns at sparsification rate `rate`:
/// `max(1, round(log2(cols) / rate))`.
pub fn target_height(cols: usize, rate: Rate) -> usize {
    crate::theory::rows_for_aspect(cols, rate.value())
}

/// Splits `total_rows` into `max(1, floor(total_rows / h))` blocks with
/// `h = target_height(cols, rate)`, spreading the remainder as `+1` on the
/// leading blocks. A 64×64 matrix at rate 1 becomes four blocks of 7 rows
/// and six of 6.
pub fn plan_blocks(total_rows: usize, cols: usize, rate: Rate) -> BlockPlan {
    assert!(
        total_rows >= 1 && cols >= 2,
        "need at least one row and two columns"
    );
    let h = target_height(cols, rate);
    let count = (total_rows / h).max(1);
    let base = total_rows / count;
    let extra = total_rows % count;
    let mut blocks = Vec::with_capacity(count);
    let mut start = 0;
    for b in 0..count {
        let row_count = base + usize::from(b < extra);
        blocks.push(Block {
            row_start: start,
            row_count,
        });
        start += row_count;
    }
    BlockPlan {
        total_rows,
        target_height: h,
        blocks,
    }
}
