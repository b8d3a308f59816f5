//! Criterion benchmarks for `chiwave-core`. See `benches/`.
