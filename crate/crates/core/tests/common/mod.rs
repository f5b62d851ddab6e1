#![allow(dead_code)]

use cartesian_topk::IndexedValue;

/// Per-element tolerance for comparing sums produced by different groupings.
pub const VALUE_TOL: f64 = 1e-9;

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= VALUE_TOL * a.abs().max(b.abs()).max(1.0)
}

pub fn sequences_match(got: &[f64], want: &[f64]) -> bool {
    got.len() == want.len() && got.iter().zip(want).all(|(&a, &b)| close(a, b))
}

pub fn recomputes(item: &IndexedValue, vectors: &[Vec<f64>]) -> bool {
    item.indices.len() == vectors.len()
        && item
            .indices
            .iter()
            .zip(vectors)
            .all(|(&i, v)| (i as usize) < v.len())
        && close(item.recompute(vectors), item.value)
}

pub fn tuples_unique(items: &[IndexedValue]) -> bool {
    let mut tuples: Vec<&Vec<u32>> = items.iter().map(|it| &it.indices).collect();
    tuples.sort();
    tuples.windows(2).all(|w| w[0] != w[1])
}

/// Small deterministic generator for test instances.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE5_E4B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `lo..=hi`.
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }

    /// Vectors with `m` in `1..=max_m` and lengths in `1..=max_n`. Half the
    /// instances use small integers so that equal sums are common.
    pub fn instance(&mut self, max_m: usize, max_n: usize) -> Vec<Vec<f64>> {
        let m = self.range(1, max_m);
        let integral = self.next_u64() & 1 == 0;
        (0..m)
            .map(|_| {
                let n = self.range(1, max_n);
                (0..n)
                    .map(|_| {
                        if integral {
                            self.range(0, 6) as f64 - 3.0
                        } else {
                            (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 20.0 - 10.0
                        }
                    })
                    .collect()
            })
            .collect()
    }
}
