//! Stateless counter-based uniform variates keyed by (seed, edge id, stream, index).

/// Stream tags. Static weights share the dynamical weight stream at index 0,
/// so a static field equals the dynamical environment at time 0.
pub const STREAM_WEIGHT: u64 = 0x5745_4947_4854;
pub const STREAM_CLOCK: u64 = 0x0043_4c4f_434b;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64 mixed bits for the given key.
#[inline]
pub fn hash_key(seed: u64, id: u128, stream: u64, index: u64) -> u64 {
    let mut h = mix64(seed ^ 0x243f_6a88_85a3_08d3);
    h = mix64(h ^ id as u64);
    h = mix64(h ^ (id >> 64) as u64);
    h = mix64(h ^ stream);
    mix64(h ^ index)
}

/// Uniform variate in [0, 1) with 53 bits of resolution.
#[inline]
pub fn uniform(seed: u64, id: u128, stream: u64, index: u64) -> f64 {
    (hash_key(seed, id, stream, index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Derives an independent seed for replica `k`.
pub fn replica_seed(base: u64, k: u64) -> u64 {
    mix64(mix64(base ^ 0x1357_9bdf_2468_ace0).wrapping_add(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equidistribution_self_test() {
        let n = 1_000_000u64;
        let bins = 100usize;
        let mut counts = vec![0u64; bins];
        let (mut sum, mut sum2) = (0.0, 0.0);
        for i in 0..n {
            let u = uniform(7, i as u128 * 3 + 1, STREAM_WEIGHT, 0);
            assert!((0.0..1.0).contains(&u));
            sum += u;
            sum2 += u * u;
            counts[(u * bins as f64) as usize] += 1;
        }
        let mean = sum / n as f64;
        let var = sum2 / n as f64 - mean * mean;
        // stderr of the mean is 1/sqrt(12 n) ≈ 2.9e-4
        assert!((mean - 0.5).abs() < 1.5e-3, "mean {mean}");
        assert!((var - 1.0 / 12.0).abs() < 1e-3, "var {var}");
        let expected = n as f64 / bins as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 99.9% quantile of chi-square with 99 degrees of freedom is about 149
        assert!(chi2 < 149.0, "chi2 {chi2}");
    }

    #[test]
    fn streams_and_indices_decorrelate() {
        let n = 200_000;
        let mut cross = 0.0;
        for i in 0..n {
            let a = uniform(1, i, STREAM_WEIGHT, 0) - 0.5;
            let b = uniform(1, i, STREAM_CLOCK, 0) - 0.5;
            cross += a * b;
        }
        // correlation stderr ≈ 1/sqrt(n)
        let corr = cross / n as f64 * 12.0;
        assert!(corr.abs() < 4.0 / (n as f64).sqrt(), "corr {corr}");
    }

    #[test]
    fn deterministic() {
        assert_eq!(uniform(3, 99, STREAM_CLOCK, 4), uniform(3, 99, STREAM_CLOCK, 4));
        assert_ne!(replica_seed(3, 0), replica_seed(3, 1));
    }
}
