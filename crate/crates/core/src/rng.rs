//! xorshift64* generator used by every instance generator.
//!
//! The algorithm is fixed so that an instance can be regenerated bit for bit
//! from its parameters in any language:
//!
//! * seeding: the 64-bit seed is passed once through SplitMix64
//!   (`z = seed + 0x9E3779B97F4A7C15; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9;
//!   z = (z ^ z>>27) * 0x94D049BB133111EB; z ^= z>>31`), and a zero result is
//!   replaced by `0x9E3779B97F4A7C15`;
//! * step: `x ^= x>>12; x ^= x<<25; x ^= x>>27`, output `x * 0x2545F4914F6CDD1D`
//!   (all arithmetic wrapping mod 2^64);
//! * `below(n)`: rejection sampling on the output, discarding draws
//!   `>= 2^64 - (2^64 mod n)` and returning `draw mod n`.

#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        let mut z = seed.wrapping_add(GOLDEN);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        XorShift64Star { state: if z == 0 { GOLDEN } else { z } }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - (u64::MAX % n + 1) % n;
        loop {
            let r = self.next_u64();
            if r <= zone {
                return r % n;
            }
        }
    }

    /// Fisher-Yates from the last index down.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// `k` distinct elements of `items` chosen uniformly, in draw order.
    pub fn sample<T: Clone>(&mut self, items: &[T], k: usize) -> Vec<T> {
        assert!(k <= items.len());
        let mut pool = items.to_vec();
        for i in 0..k {
            let j = i + self.below((pool.len() - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_stream() {
        // frozen: changing these breaks instance reproducibility
        let mut r = XorShift64Star::new(0);
        let first: Vec<u64> = (0..3).map(|_| r.next_u64()).collect();
        // independently computed from the documented constants
        assert_eq!(first, vec![0x7bbc_b40d_5506_82d0, 0xde7f_e413_d00c_c9fd, 0xb3c6_3835_3c66_8c91]);
    }

    #[test]
    fn below_is_in_range_and_covers() {
        let mut r = XorShift64Star::new(42);
        let mut seen = [0u32; 7];
        for _ in 0..7000 {
            seen[r.below(7) as usize] += 1;
        }
        assert!(seen.iter().all(|&c| c > 800), "{seen:?}");
        assert_eq!(r.below(1), 0);
    }

    #[test]
    fn sample_is_distinct() {
        let mut r = XorShift64Star::new(9);
        let items: Vec<u32> = (0..20).collect();
        let mut s = r.sample(&items, 10);
        s.sort();
        s.dedup();
        assert_eq!(s.len(), 10);
    }
}
