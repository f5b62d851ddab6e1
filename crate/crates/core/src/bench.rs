//! Reproducible random instances and timed engine runs.

use std::io::{self, Write};
use std::time::Instant;

use crate::selection::{Engine, SelectionError, TopKResult};

/// SplitMix64 step.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE5_E4B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `m` vectors of `n` values, each uniform on the open interval (0, 1).
///
/// Values are drawn vector by vector from one SplitMix64 stream seeded with
/// `seed`; a draw `x` maps to `((x >> 11) + 0.5) / 2^53`. Any implementation
/// of those two rules reproduces the same instance.
pub fn generate_instance(m: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut state = seed;
    (0..m)
        .map(|_| {
            (0..n)
                .map(|_| ((splitmix64(&mut state) >> 11) as f64 + 0.5) / (1u64 << 53) as f64)
                .collect()
        })
        .collect()
}

/// Runs one engine and times only the engine call.
pub fn measure(
    engine: Engine,
    vectors: &[Vec<f64>],
    k: usize,
) -> Result<(TopKResult, f64), SelectionError> {
    let start = Instant::now();
    let result = engine.top_k(vectors, k)?;
    Ok((result, start.elapsed().as_secs_f64()))
}

/// Runs `repeats` times (at least once) and keeps the fastest wall time.
/// Results are deterministic, so the last run's output stands for all of them.
pub fn measure_min(
    engine: Engine,
    vectors: &[Vec<f64>],
    k: usize,
    repeats: usize,
) -> Result<(TopKResult, f64), SelectionError> {
    let (mut result, mut best) = measure(engine, vectors, k)?;
    for _ in 1..repeats {
        let (r, secs) = measure(engine, vectors, k)?;
        result = r;
        best = best.min(secs);
    }
    Ok((result, best))
}

pub const CSV_HEADER: &str =
    "m,n,k,method,wall_seconds,heap_pushes,heap_pops,peak_fringe_entries,peak_entry_bytes_estimate";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub method: Engine,
    pub wall_seconds: f64,
    pub heap_pushes: u64,
    pub heap_pops: u64,
    pub peak_fringe_entries: u64,
    pub peak_entry_bytes_estimate: u64,
}

/// For each size `m`, one instance of `m` vectors of length `m`, and one run
/// per method with `k = m`.
pub fn run_bench(
    sizes: &[usize],
    methods: &[Engine],
    seed: u64,
    repeats: usize,
) -> Result<Vec<BenchRow>, SelectionError> {
    let mut rows = Vec::with_capacity(sizes.len() * methods.len());
    for &m in sizes {
        let vectors = generate_instance(m, m, seed);
        for &method in methods {
            let (result, wall_seconds) = measure_min(method, &vectors, m, repeats)?;
            let c = result.counters;
            rows.push(BenchRow {
                m,
                n: m,
                k: m,
                method,
                wall_seconds,
                heap_pushes: c.heap_pushes,
                heap_pops: c.heap_pops,
                peak_fringe_entries: c.peak_fringe_entries,
                peak_entry_bytes_estimate: c.peak_entry_bytes_estimate,
            });
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(mut out: W, rows: &[BenchRow]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{:.9},{},{},{},{}",
            r.m,
            r.n,
            r.k,
            r.method,
            r.wall_seconds,
            r.heap_pushes,
            r.heap_pops,
            r.peak_fringe_entries,
            r.peak_entry_bytes_estimate
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force_top_k;

    #[test]
    fn deterministic() {
        assert_eq!(generate_instance(3, 5, 42), generate_instance(3, 5, 42));
    }

    #[test]
    fn shape_and_range() {
        let v = generate_instance(2, 3, 7);
        assert_eq!(v.len(), 2);
        for row in &v {
            assert_eq!(row.len(), 3);
            assert!(row.iter().all(|x| x.is_finite() && *x > 0.0 && *x < 1.0));
        }
    }

    #[test]
    fn seeds_differ() {
        let mut a: Vec<f64> = generate_instance(4, 4, 1).concat();
        let mut b: Vec<f64> = generate_instance(4, 4, 2).concat();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_ne!(a, b);
    }

    #[test]
    fn first_draw_is_pinned() {
        // SplitMix64 from state 0 yields 0x78CD3D51651E236A first.
        let x = 0x78CD_3D51_651E_236Au64;
        let expected = ((x >> 11) as f64 + 0.5) / 9_007_199_254_740_992.0;
        assert_eq!(generate_instance(1, 1, 0)[0][0], expected);
    }

    #[test]
    fn measure_oracle_is_identity() {
        let v = generate_instance(3, 3, 9);
        let (result, secs) = measure(Engine::Oracle, &v, 5).unwrap();
        assert_eq!(result, brute_force_top_k(&v, 5).unwrap());
        assert!(secs > 0.0);
    }

    #[test]
    fn tensor_and_tree_agree_at_64() {
        let v = generate_instance(64, 64, 2024);
        let (tree, _) = measure(Engine::Tree, &v, 64).unwrap();
        let (tensor, _) = measure(Engine::Tensor, &v, 64).unwrap();
        for (a, b) in tree.values().iter().zip(tensor.values()) {
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
        assert_eq!(tree.items.len(), 64);
        assert_eq!(tensor.items.len(), 64);
    }

    #[test]
    fn csv_layout() {
        let rows = run_bench(&[4], &[Engine::Tree, Engine::Tensor], 3, 1).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("4,4,4,tree,"));
        assert!(lines[2].starts_with("4,4,4,tensor,"));
    }
}
