//! Criterion benchmarks for `weakphase-core` live under `benches/`.
