//! Benchmarks for `cfraj-core` live under `benches/`.
