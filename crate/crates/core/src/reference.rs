//! Reference SNR figures (dB) for multiplicative approximation of iid
//! Gaussian matrices, used as benchmark targets.

/// `(N, K, SNR for Q = 1..=5)` at sparsity `N` per column (rate 1).
pub const TABLE1: [(usize, usize, [f64; 5]); 13] = [
    (2, 4, [14.2, 20.6, 24.8, 27.2, 28.6]),
    (3, 8, [14.2, 25.1, 32.0, 36.3, 39.1]),
    (4, 16, [14.2, 30.0, 42.1, 50.7, 57.1]),
    (5, 32, [14.2, 35.6, 54.7, 70.7, 82.7]),
    (6, 64, [14.2, 41.3, 67.5, 92.9, 117.0]),
    (7, 128, [14.2, 47.0, 79.4, 112.0, 144.0]),
    (8, 256, [14.2, 52.6, 90.8, 129.0, 167.0]),
    (9, 512, [14.2, 58.1, 102.0, 146.0, 190.0]),
    (10, 1024, [14.2, 63.5, 113.0, 162.0, 212.0]),
    (11, 2048, [14.2, 69.1, 124.0, 179.0, 234.0]),
    (12, 4096, [14.2, 74.6, 135.0, 195.0, 256.0]),
    (13, 8192, [14.2, 80.1, 146.0, 212.0, 278.0]),
    (14, 16384, [14.2, 85.7, 157.0, 228.0, 300.0]),
];

/// `(1/R, SNR for Q = 1..=7)` on `10/R × 1024` matrices.
pub const TABLE2: [(u32, [f64; 7]); 12] = [
    (1, [14.0, 64.0, 113.0, 162.0, 212.0, 261.0, 310.0]),
    (2, [10.0, 33.0, 55.0, 78.0, 101.0, 123.0, 145.0]),
    (3, [6.7, 21.0, 35.0, 49.0, 63.0, 78.0, 92.0]),
    (4, [5.1, 15.0, 26.0, 36.0, 46.0, 55.0, 65.0]),
    (5, [4.2, 12.0, 20.0, 28.0, 35.0, 43.0, 50.0]),
    (6, [3.6, 10.0, 16.0, 23.0, 29.0, 34.0, 40.0]),
    (7, [3.2, 8.7, 14.0, 19.0, 24.0, 29.0, 34.0]),
    (8, [2.9, 7.6, 12.0, 16.0, 21.0, 25.0, 29.0]),
    (9, [2.6, 6.8, 11.0, 14.0, 18.0, 21.0, 25.0]),
    (10, [2.4, 6.1, 9.6, 13.0, 16.0, 19.0, 22.0]),
    (11, [2.2, 5.6, 8.6, 12.0, 14.0, 17.0, 20.0]),
    (12, [2.1, 5.1, 7.9, 11.0, 13.0, 15.0, 18.0]),
];

/// Additions-per-entry budgets of [`TABLE3`] as `(numerator, denominator)`.
pub const TABLE3_BUDGETS: [(u32, u32); 6] = [(1, 4), (1, 3), (1, 2), (1, 1), (2, 1), (3, 1)];

/// `(K, best SNR per budget)` with the sparsification rate optimized.
pub const TABLE3: [(usize, [f64; 6]); 4] = [
    (256, [6.3, 8.3, 13.0, 27.0, 60.0, 93.0]),
    (1024, [7.9, 11.0, 16.0, 36.0, 78.0, 123.0]),
    (4096, [10.0, 13.0, 21.0, 45.0, 98.0, 152.0]),
    (16384, [12.0, 17.0, 26.0, 55.0, 118.0, 183.0]),
];

/// Table 1 entry for an `n × k` matrix with `q` factors, if listed.
pub fn table1(n: usize, k: usize, q: usize) -> Option<f64> {
    TABLE1
        .iter()
        .find(|(rn, rk, _)| *rn == n && *rk == k)
        .and_then(|(_, _, v)| v.get(q.checked_sub(1)?).copied())
}

/// Table 2 entry for rate `1/inv_rate` with `q` factors, if listed.
pub fn table2(inv_rate: u32, q: usize) -> Option<f64> {
    TABLE2
        .iter()
        .find(|(d, _)| *d == inv_rate)
        .and_then(|(_, v)| v.get(q.checked_sub(1)?).copied())
}
