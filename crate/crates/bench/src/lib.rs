//! Benchmark-only crate: targets live under `benches/`.
