//! Benchmark-only crate; see `benches/selection.rs`.
