//! Explicit query bounds for each elicitation procedure.

use crate::domain::pair_count;

/// `⌈log₂ x⌉`, with `ceil_log2(0) = ceil_log2(1) = 0`.
pub fn ceil_log2(x: usize) -> usize {
    if x <= 1 {
        0
    } else {
        (usize::BITS - (x - 1).leading_zeros()) as usize
    }
}

/// Merge-sort elicitation of one vote: `m⌈log₂ m⌉`.
pub fn sort_bound(m: usize) -> usize {
    m * ceil_log2(m)
}

/// Binary search per pair along a known order: `C(m,2)(⌈log₂ n⌉ + 1)`.
pub fn known_random_bound(m: usize, n: usize) -> usize {
    pair_count(m) * (ceil_log2(n) + 1)
}

/// Insertion against the previous vote, arrival in a single-crossing order.
pub fn sequential_sc_bound(m: usize, n: usize) -> usize {
    sort_bound(m) + (n - 1) * m.saturating_sub(1) + pair_count(m)
}

/// Insertion against the nearest elicited vote, arbitrary arrival.
pub fn sequential_known_any_bound(m: usize, n: usize) -> usize {
    sort_bound(m) + (n - 1) * m.saturating_sub(1) + pair_count(m) * (ceil_log2(n) + 1)
}

/// Dictionary search with `distinct` distinct votes in the profile.
pub fn unknown_bound(m: usize, n: usize, distinct: usize) -> usize {
    n * (m.saturating_sub(1) + ceil_log2(pair_count(m) + 1)) + distinct * sort_bound(m)
}

/// Per-voter cost of sorting every block of a partition.
pub fn block_sort_bound(block_sizes: impl IntoIterator<Item = usize>, n: usize) -> usize {
    n * block_sizes.into_iter().map(sort_bound).sum::<usize>()
}
