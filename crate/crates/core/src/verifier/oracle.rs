//! Counting cross-check for the composition enumerator.

/// Number of partitions of `total` into exactly `h` parts, from the
/// recurrence `p(n, k) = p(n - 1, k - 1) + p(n - k, k)`.
pub fn count_partitions_oracle(total: usize, h: usize) -> u128 {
    // table[n][k]
    let mut table = vec![vec![0u128; h + 1]; total + 1];
    table[0][0] = 1;
    for n in 1..=total {
        for k in 1..=h.min(n) {
            table[n][k] = table[n - 1][k - 1] + table[n - k][k];
        }
    }
    table[total][h]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(count_partitions_oracle(6, 3), 3);
        assert_eq!(count_partitions_oracle(5, 2), 2);
        assert_eq!(count_partitions_oracle(10, 4), 9);
        assert_eq!(count_partitions_oracle(0, 0), 1);
        assert_eq!(count_partitions_oracle(3, 4), 0);
        assert_eq!(count_partitions_oracle(4, 0), 0);
    }
}
