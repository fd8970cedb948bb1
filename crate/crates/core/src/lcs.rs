//! Longest-common-subsequence helpers shared by the cost function and the
//! similarity providers.

use crate::Scalar;

/// Length of the longest common subsequence of two slices.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `2 * LCS / (|a| + |b|)`, with two empty sequences scoring 1.
pub fn lcs_ratio<S: Scalar, T: PartialEq>(a: &[T], b: &[T]) -> S {
    let total = a.len() + b.len();
    if total == 0 {
        return S::one();
    }
    S::ratio(2 * lcs_len(a, b), total)
}
