//! Benchmarks for the solver hot paths; see `benches/engine.rs`.
