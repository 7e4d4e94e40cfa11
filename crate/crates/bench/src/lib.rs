//! Criterion benchmarks for the scriptorium pipeline; see `benches/`.
