//! Criterion benchmarks for the hot paths of `epitaxy-core`; see `benches/`.
