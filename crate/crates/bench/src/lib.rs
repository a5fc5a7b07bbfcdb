//! Benchmarks for the hmap-core hot paths live in `benches/`.
